#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "splitsec/attack.hpp"
#include "splitsec/error.hpp"
#include "splitsec/harness.hpp"
#include "splitsec/layout.hpp"
#include "splitsec/leakage.hpp"
#include "splitsec/protect.hpp"
#include "splitsec/serialize.hpp"

using namespace splitsec;

namespace {

struct Options {
    std::string bench;
    std::string output;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> seeds;
    int bin_width = 1;
    double utilization = 0.8;
    std::size_t effort = 100;
    std::string technique = "none";
    std::vector<std::string> techniques;
    std::string attack = "greedy";
    std::vector<std::string> attacks;
    std::string out_dir;
    bool json = false;
    bool csv = false;
    bool exclude_pads = false;
    std::string partitioning_file;
    std::string placement_file;
    std::string report_file;
    std::string recovered_file;
    std::vector<std::string> benches;
    double fraction = 1.0;
    std::size_t steps = 11;
    std::size_t max_fanout = 0;
    unsigned jobs = 1;
};

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Json read_json(const std::string &path)
{
    try {
        return Json::parse(read_file(path));
    } catch (const Json::exception &e) {
        throw Error(path + ": " + e.what());
    }
}

void emit(const Options &o, const std::string &text)
{
    if (o.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(o.output, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + o.output + "'");
    out << text;
}

void emit(const Options &o, const Json &json) { emit(o, json.dump(2) + "\n"); }

Partitioning make_partitioning(const NetlistGraph &g, const Options &o)
{
    if (!o.partitioning_file.empty())
        return partitioning_from_json(read_json(o.partitioning_file), g);
    auto t = partition_technique_from_name(o.technique);
    if (!t)
        throw ConfigError("unknown technique '" + o.technique + "' (none, g_color, g_type1, g_type2)");
    switch (*t) {
    case PartitionTechnique::None:
        return identity_partition(g);
    case PartitionTechnique::GColor:
        return g_color(g, o.seed);
    case PartitionTechnique::GType1:
        return g_type(g, GTypeFlavor::KindOnly, o.seed);
    case PartitionTechnique::GType2:
        return g_type(g, GTypeFlavor::KindAndFanin, o.seed);
    }
    throw InvariantError("unhandled technique");
}

Placement load_placement(const NetlistGraph &g, const Options &o)
{
    if (o.placement_file.empty())
        throw ConfigError("--placement is required");
    Placement pl = placement_from_json(read_json(o.placement_file), g);
    validate_placement(g, pl, false);
    return pl;
}

template <class T, class F>
std::vector<T> parse_names(const std::vector<std::string> &names, F from_name, const char *what)
{
    std::vector<T> out;
    for (const auto &n : names) {
        auto v = from_name(n);
        if (!v)
            throw ConfigError(std::string("unknown ") + what + " '" + n + "'");
        out.push_back(*v);
    }
    return out;
}

int cmd_parse(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    if (o.json) {
        emit(o, to_json(g));
    } else {
        const NetlistStats s = stats(g);
        emit(o, "inputs " + std::to_string(s.input_count) + "\noutputs " + std::to_string(s.output_count) +
                    "\ngates " + std::to_string(s.gate_count) + "\nconnected_pairs " +
                    std::to_string(connected_pairs(g).size()) + "\n");
    }
    return 0;
}

int cmd_protect(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const Partitioning p = make_partitioning(g, o);
    validate_partitioning(g, p);
    emit(o, to_json(p, g));
    return 0;
}

int cmd_floorplan(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const FencePlan plan = floorplan(make_partitioning(g, o), g, o.utilization);
    validate_fence_plan(g, plan);
    emit(o, to_json(plan, g));
    return 0;
}

int cmd_place(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const FencePlan plan = floorplan(make_partitioning(g, o), g, o.utilization);
    const Placement pl = place(g, plan, o.seed, o.effort);
    validate_placement(g, pl);
    emit(o, to_json(pl, g));
    return 0;
}

int cmd_shuffle(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const Placement pl = shuffle(g, load_placement(g, o), o.fraction, o.seed);
    validate_placement(g, pl, false);
    emit(o, to_json(pl, g));
    return 0;
}

int cmd_mi(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const JointDistribution joint = joint_distribution(g, load_placement(g, o), o.bin_width, !o.exclude_pads);
    if (o.csv) {
        emit(o, joint_distribution_csv(joint));
        return 0;
    }
    Json j = to_json(mutual_information(joint));
    j["reverse_mi"] = reverse_mutual_information(joint);
    j["bin_width"] = o.bin_width;
    j["total_pairs"] = joint.total_pairs;
    emit(o, j);
    return 0;
}

int cmd_attack(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    const FeolView view = feol_view(g, load_placement(g, o));
    auto kind = attack_from_name(o.attack);
    if (!kind)
        throw ConfigError("unknown attack '" + o.attack + "' (greedy, assignment)");
    AttackResult r = *kind == AttackKind::Greedy ? greedy_proximity_attack(view)
                                                 : assignment_attack(view, {o.max_fanout, AssignmentOptions{}.candidates});
    if (!recovery_is_well_formed(view, r))
        throw InvariantError("attack produced a malformed netlist");
    apply_score(r, ground_truth(g));
    if (!o.recovered_file.empty()) {
        std::ofstream out(o.recovered_file, std::ios::binary);
        if (!out)
            throw Error("cannot write '" + o.recovered_file + "'");
        out << recovered_bench(view, r);
    }
    emit(o, to_json(r, view));
    return 0;
}

int cmd_pipeline(const Options &o)
{
    ExperimentConfig cfg;
    for (const auto &b : o.benches)
        cfg.benches.emplace_back(b);
    cfg.techniques = parse_names<Technique>(o.techniques, technique_from_name, "technique");
    cfg.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
    cfg.attacks = o.attacks.empty() ? parse_names<AttackKind>({o.attack}, attack_from_name, "attack")
                                    : parse_names<AttackKind>(o.attacks, attack_from_name, "attack");
    cfg.utilization = o.utilization;
    cfg.bin_width = o.bin_width;
    cfg.effort = o.effort;
    cfg.out_dir = o.out_dir;
    cfg.jobs = o.jobs;
    cfg.include_pads = !o.exclude_pads;
    const ExperimentReport report = run_pipeline(cfg);
    emit(o, o.json ? report_json(report) : report_csv(report));
    for (const RowResult &r : report.rows)
        if (!r.ok)
            std::cerr << "row " << r.benchmark << "/" << technique_name(r.technique) << "/" << r.seed
                      << " failed: " << r.error << "\n";
    return 0;
}

int cmd_sweep(const Options &o)
{
    const NetlistGraph g = load_bench(o.bench);
    SweepConfig cfg;
    cfg.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
    cfg.steps = o.steps;
    cfg.utilization = o.utilization;
    cfg.bin_width = o.bin_width;
    cfg.effort = o.effort;
    cfg.include_pads = !o.exclude_pads;
    const SweepReport report = mi_vs_attack_sweep(g, std::filesystem::path(o.bench).stem().string(), cfg);

    Json summary = {{"benchmark", report.benchmark},
                    {"fractions", report.fractions},
                    {"mean_normalized_mi", report.mean_normalized_mi},
                    {"mean_rate", report.mean_rate},
                    {"correlation", report.correlation},
                    {"pooled_correlation", report.pooled_correlation}};
    if (!o.out_dir.empty()) {
        std::filesystem::create_directories(o.out_dir);
        std::ofstream(std::filesystem::path(o.out_dir) / "sweep.csv", std::ios::binary) << sweep_csv(report);
        std::ofstream(std::filesystem::path(o.out_dir) / "sweep.json", std::ios::binary) << summary.dump(2) << "\n";
    }
    if (o.json)
        emit(o, summary);
    else
        emit(o, sweep_csv(report));
    return 0;
}

int cmd_table2(const Options &o)
{
    const ExperimentReport report = report_from_json(read_file(o.report_file));
    emit(o, table2_csv(table2_report(report.rows)));
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Split-manufacturing layout protection and leakage workbench"};
    app.require_subcommand(1);
    Options o;

    auto add_bench = [&](CLI::App *c) { c->add_option("bench", o.bench, ".bench netlist")->required()->check(CLI::ExistingFile); };
    auto add_output = [&](CLI::App *c) { c->add_option("-o,--output", o.output, "write to a file instead of stdout"); };
    auto add_layout = [&](CLI::App *c) {
        c->add_option("--technique", o.technique, "none, g_color, g_type1 or g_type2")->capture_default_str();
        c->add_option("--partitioning", o.partitioning_file, "partitioning JSON (overrides --technique)");
        c->add_option("--utilization", o.utilization, "fence utilization in (0, 1]")->capture_default_str();
    };

    auto *parse = app.add_subcommand("parse", "parse a netlist and print its statistics");
    add_bench(parse);
    parse->add_flag("--json", o.json, "dump the netlist graph as JSON");
    add_output(parse);

    auto *protect = app.add_subcommand("protect", "partition a netlist");
    add_bench(protect);
    protect->add_option("--technique", o.technique, "none, g_color, g_type1 or g_type2")->capture_default_str();
    protect->add_option("--seed", o.seed)->capture_default_str();
    add_output(protect);

    auto *fp = app.add_subcommand("floorplan", "pack one fence per partition");
    add_bench(fp);
    add_layout(fp);
    fp->add_option("--seed", o.seed, "partitioning seed")->capture_default_str();
    add_output(fp);

    auto *pl = app.add_subcommand("place", "anneal cells inside their fences");
    add_bench(pl);
    add_layout(pl);
    pl->add_option("--seed", o.seed)->capture_default_str();
    pl->add_option("--effort", o.effort, "temperature steps")->capture_default_str();
    add_output(pl);

    auto *sh = app.add_subcommand("shuffle", "permute the sites of a fraction of the cells");
    add_bench(sh);
    sh->add_option("--placement", o.placement_file)->required();
    sh->add_option("--fraction", o.fraction)->capture_default_str();
    sh->add_option("--seed", o.seed)->capture_default_str();
    add_output(sh);

    auto *mi = app.add_subcommand("mi", "mutual information between connectivity and distance");
    add_bench(mi);
    mi->add_option("--placement", o.placement_file)->required();
    mi->add_option("--bin-width", o.bin_width)->capture_default_str();
    mi->add_flag("--no-pads", o.exclude_pads, "leave PI/PO pads out of the pair universe");
    auto *mi_fmt = mi->add_option_group("format");
    mi_fmt->add_flag("--json", o.json, "leakage report (default)");
    mi_fmt->add_flag("--csv", o.csv, "joint histogram");
    mi_fmt->require_option(0, 1);
    add_output(mi);

    auto *at = app.add_subcommand("attack", "proximity attack on the FEOL view");
    add_bench(at);
    at->add_option("--placement", o.placement_file)->required();
    at->add_option("--attack", o.attack, "greedy or assignment")->capture_default_str();
    at->add_option("--max-fanout", o.max_fanout, "assignment fan-out cap, 0 = unbounded")->capture_default_str();
    at->add_option("--recovered", o.recovered_file, "write the recovered netlist as .bench");
    add_output(at);

    auto *pipe = app.add_subcommand("pipeline", "run every benchmark x technique x seed row");
    pipe->add_option("benches", o.benches, ".bench netlists")->required()->check(CLI::ExistingFile);
    pipe->add_option("--technique", o.techniques, "techniques: none, random, g_color, g_type1, g_type2")
        ->delimiter(',')
        ->required();
    pipe->add_option("--seed", o.seeds, "seeds")->delimiter(',');
    pipe->add_option("--attack", o.attacks, "greedy, assignment")->delimiter(',');
    pipe->add_option("--utilization", o.utilization)->capture_default_str();
    pipe->add_option("--bin-width", o.bin_width)->capture_default_str();
    pipe->add_option("--effort", o.effort)->capture_default_str();
    pipe->add_option("--jobs", o.jobs)->capture_default_str();
    pipe->add_option("--out-dir", o.out_dir, "write report.json, report.csv and timings.csv");
    pipe->add_flag("--no-pads", o.exclude_pads);
    auto *pipe_fmt = pipe->add_option_group("format");
    pipe_fmt->add_flag("--json", o.json);
    pipe_fmt->add_flag("--csv", o.csv, "default");
    pipe_fmt->require_option(0, 1);
    add_output(pipe);

    auto *sw = app.add_subcommand("sweep", "normalized MI and attack rate over shuffle fractions");
    add_bench(sw);
    sw->add_option("--seed", o.seeds, "seeds")->delimiter(',');
    sw->add_option("--steps", o.steps)->capture_default_str();
    sw->add_option("--utilization", o.utilization)->capture_default_str();
    sw->add_option("--bin-width", o.bin_width)->capture_default_str();
    sw->add_option("--effort", o.effort)->capture_default_str();
    sw->add_option("--out-dir", o.out_dir, "write sweep.csv and sweep.json");
    sw->add_flag("--no-pads", o.exclude_pads);
    auto *sw_fmt = sw->add_option_group("format");
    sw_fmt->add_flag("--json", o.json, "summary with the correlation");
    sw_fmt->add_flag("--csv", o.csv, "per-point rows (default)");
    sw_fmt->require_option(0, 1);
    add_output(sw);

    auto *t2 = app.add_subcommand("table2", "MI reduction table from a pipeline report");
    t2->add_option("report", o.report_file, "report.json")->required()->check(CLI::ExistingFile);
    add_output(t2);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*parse)
            return cmd_parse(o);
        if (*protect)
            return cmd_protect(o);
        if (*fp)
            return cmd_floorplan(o);
        if (*pl)
            return cmd_place(o);
        if (*sh)
            return cmd_shuffle(o);
        if (*mi)
            return cmd_mi(o);
        if (*at)
            return cmd_attack(o);
        if (*pipe)
            return cmd_pipeline(o);
        if (*sw)
            return cmd_sweep(o);
        if (*t2)
            return cmd_table2(o);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvariantError &e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 2;
    } catch (const std::filesystem::filesystem_error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
