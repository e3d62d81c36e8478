// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance core                 criteria that need no external data
//   acceptance iscas [--bench-dir]  criteria on the ISCAS-85 files; exit 77 when absent

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <climits>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "splitsec/attack.hpp"
#include "splitsec/error.hpp"
#include "splitsec/harness.hpp"
#include "splitsec/leakage.hpp"
#include "splitsec/protect.hpp"
#include "splitsec/rng.hpp"
#include "splitsec/stats.hpp"

using namespace splitsec;

namespace {

constexpr int kSkip = 77;

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double limit_seconds;
    std::function<Outcome()> run;
};

int run_all(const std::vector<Criterion> &criteria, const std::set<int> &only)
{
    int failures = 0;
    for (const Criterion &c : criteria) {
        if (!only.empty() && !only.count(c.id))
            continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception &e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds >= c.limit_seconds) {
            out.pass = false;
            out.detail += "; over time budget";
        }
        std::printf("%s  [%2d] %-28s %7.2fs / %.0fs  %s\n", out.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), seconds,
                    c.limit_seconds, out.detail.c_str());
        std::fflush(stdout);
        failures += !out.pass;
    }
    return failures == 0 ? 0 : 1;
}

std::string fmt(const char *format, auto... args)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

// ---- leakage oracle --------------------------------------------------------

double brute_force_mi(const NetlistGraph &g, const Placement &pl, int bin_width)
{
    std::set<std::pair<GateId, GateId>> edges;
    for (const Edge &e : g.edges())
        edges.insert({std::min(e.driver, e.sink), std::max(e.driver, e.sink)});
    std::map<std::pair<int, int>, double> joint;
    double pairs = 0;
    for (GateId u = 0; u < g.size(); ++u)
        for (GateId v = u + 1; v < g.size(); ++v) {
            joint[{edges.count({u, v}) ? 1 : 0, manhattan(pl.sites[u], pl.sites[v]) / bin_width}] += 1;
            pairs += 1;
        }
    std::map<int, double> px, pd;
    for (auto &[key, count] : joint) {
        count /= pairs;
        px[key.first] += count;
        pd[key.second] += count;
    }
    double mi = 0;
    for (const auto &[key, p] : joint)
        mi += p * std::log2(p / (px[key.first] * pd[key.second]));
    return mi;
}

Outcome mi_oracle()
{
    Rng rng(2024);
    double worst = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const fixtures::DagShape shape{1 + rng.below(3), 1 + rng.below(3), 1 + rng.below(2)};
        const NetlistGraph g = fixtures::random_dag(shape, rng.next());
        if (g.size() > 8)
            return {false, "generator produced more than 8 vertices"};
        const Placement pl = fixtures::random_layout(g, 4, 4, rng.next());
        const int width = 1 + static_cast<int>(rng.below(3));
        const double mi = mutual_information(joint_distribution(g, pl, width)).mi;
        worst = std::max(worst, std::abs(mi - brute_force_mi(g, pl, width)));
    }
    return {worst <= 1e-9, fmt("max |MI - oracle| = %.3g over 100 layouts (tol 1e-9)", worst)};
}

Outcome hand_cases()
{
    // A drives B, C is isolated
    const NetlistGraph g = parse_bench("INPUT(A)\nINPUT(C)\nB = NOT(A)\n");
    const double pure = mutual_information(joint_distribution(g, fixtures::at_sites(g, {{0, 0}, {2, 0}, {0, 1}}), 1)).mi;
    const double mixed = mutual_information(joint_distribution(g, fixtures::at_sites(g, {{0, 0}, {0, 1}, {1, 0}}), 1)).mi;
    const bool pass = std::abs(pure - 0.9183) <= 1e-4 && std::abs(mixed - 0.2516) <= 1e-4;
    return {pass, fmt("%.6f (want 0.9183), %.6f (want 0.2516), tol 1e-4", pure, mixed)};
}

// Layouts from every source used in the test corpus.
std::vector<std::pair<NetlistGraph, Placement>> layout_corpus()
{
    std::vector<std::pair<NetlistGraph, Placement>> out;
    const NetlistGraph adder = fixtures::full_adder();
    for (std::uint64_t seed = 0; seed < 20; ++seed)
        out.emplace_back(adder, fixtures::random_layout(adder, 5, 5, seed));
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const NetlistGraph g = fixtures::random_dag({6, 60, 4}, seed);
        out.emplace_back(g, fixtures::random_layout(g, 12, 12, seed));
    }
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const NetlistGraph g = fixtures::random_dag({8, 120, 6}, 100 + seed);
        const Partitioning parts[] = {identity_partition(g), g_color(g, seed), g_type(g, GTypeFlavor::KindAndFanin, seed)};
        for (const Partitioning &p : parts) {
            const Placement pl = place(g, floorplan(p, g, 0.8), seed, 20);
            out.emplace_back(g, pl);
            out.emplace_back(g, shuffle(g, pl, 0.5, seed));
        }
    }
    return out;
}

Outcome symmetry()
{
    double worst = 0;
    std::size_t count = 0;
    for (const auto &[g, pl] : layout_corpus())
        for (int width : {1, 2, 5}) {
            const JointDistribution j = joint_distribution(g, pl, width);
            worst = std::max(worst, std::abs(mutual_information(j).mi - reverse_mutual_information(j)));
            ++count;
        }
    return {worst <= 1e-9, fmt("max |I(X;D) - I(D;X)| = %.3g over %zu layouts (tol 1e-9)", worst, count)};
}

// ---- protection ------------------------------------------------------------

bool proper_coloring(const NetlistGraph &g, const Partitioning &p)
{
    for (const Edge &e : g.edges())
        if (p.assignment[e.driver] == p.assignment[e.sink])
            return false;
    for (GateId d = 0; d < g.size(); ++d) {
        std::set<std::uint32_t> colors;
        for (GateId s : g.fanout(d))
            if (!colors.insert(p.assignment[s]).second)
                return false;
    }
    return true;
}

bool type_homogeneous(const NetlistGraph &g, const Partitioning &p, GTypeFlavor flavor)
{
    for (const Partition &part : p.partitions)
        for (GateId m : part.members) {
            const Gate &gate = g.gate(m);
            if (gate.kind == GateKind::Input) {
                if (part.label != "INPUT")
                    return false;
            } else if (gate.kind == GateKind::Output) {
                if (part.label != "OUTPUT")
                    return false;
            } else if (is_buf_or_inv(gate.kind)) {
                if (part.label == "INPUT" || part.label == "OUTPUT")
                    return false;
            } else if (part.label != type_key(gate, flavor)) {
                return false;
            }
        }
    return true;
}

std::vector<NetlistGraph> graph_corpus()
{
    std::vector<NetlistGraph> out;
    for (const auto &entry : std::filesystem::directory_iterator(fixtures::data_dir()))
        if (entry.path().extension() == ".bench")
            out.push_back(load_bench(entry.path()));
    Rng rng(55);
    for (int i = 0; i < 100; ++i) {
        const std::size_t gates = 1 + rng.below(200);
        out.push_back(fixtures::random_dag({1 + rng.below(12), gates, 1 + rng.below(8)}, rng.next()));
    }
    return out;
}

Outcome coloring_invariants()
{
    std::size_t graphs = 0, bad_color = 0, bad_type = 0, bad_order = 0;
    for (const NetlistGraph &g : graph_corpus()) {
        ++graphs;
        const Partitioning colored = g_color(g, graphs);
        validate_partitioning(g, colored);
        bad_color += !proper_coloring(g, colored);
        try {
            const Partitioning one = g_type(g, GTypeFlavor::KindOnly, graphs);
            const Partitioning two = g_type(g, GTypeFlavor::KindAndFanin, graphs);
            bad_type += !type_homogeneous(g, one, GTypeFlavor::KindOnly) || !type_homogeneous(g, two, GTypeFlavor::KindAndFanin);
            bad_order += two.size() < one.size();
        } catch (const Error &) {
            // no typed gate to host inverters; nothing to check
        }
    }
    return {bad_color + bad_type + bad_order == 0,
            fmt("%zu graphs: %zu bad colorings, %zu inhomogeneous, %zu with g-type2 < g-type1", graphs, bad_color,
                bad_type, bad_order)};
}

// ---- layout ----------------------------------------------------------------

Outcome fence_containment()
{
    std::size_t runs = 0, outside = 0, multiset_changes = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const NetlistGraph g = fixtures::random_dag({8, 150, 6}, 300 + seed);
        const Partitioning parts[] = {identity_partition(g), g_color(g, seed), g_type(g, GTypeFlavor::KindOnly, seed),
                                      g_type(g, GTypeFlavor::KindAndFanin, seed)};
        for (const Partitioning &p : parts) {
            const FencePlan plan = floorplan(p, g, 0.7);
            const Placement pl = place(g, plan, seed, 30);
            ++runs;
            for (const Gate &gate : g.gates()) {
                if (is_pad_kind(gate.kind))
                    continue;
                const auto &fence = plan.fences[plan.assignment[gate.id]];
                outside += !fence || !fence->contains(pl.sites[gate.id]);
            }
            const Placement mixed = shuffle(g, pl, 1.0, seed);
            std::multiset<Site> before(pl.sites.begin(), pl.sites.end()), after(mixed.sites.begin(), mixed.sites.end());
            multiset_changes += before != after;
        }
    }
    return {outside == 0 && multiset_changes == 0,
            fmt("%zu placements: %zu cells outside fence, %zu site multisets changed by shuffle", runs, outside,
                multiset_changes)};
}

// ---- attacks ---------------------------------------------------------------

// True when every open sink's nearest driver (not itself, not a PO pad) is
// unique and is its true driver.
bool nearest_is_truth(const NetlistGraph &g, const Placement &pl)
{
    for (const Edge &e : g.edges()) {
        int best = INT_MAX;
        std::vector<GateId> at_best;
        for (const Gate &d : g.gates()) {
            if (d.id == e.sink || d.kind == GateKind::Output)
                continue;
            const int dist = manhattan(pl.sites[d.id], pl.sites[e.sink]);
            if (dist < best) {
                best = dist;
                at_best = {d.id};
            } else if (dist == best) {
                at_best.push_back(d.id);
            }
        }
        if (at_best.size() != 1 || at_best[0] != e.driver)
            return false;
    }
    return true;
}

// Random inverter forests, each tree grown around its root on a sparse grid.
std::pair<NetlistGraph, Placement> nearest_truth_candidate(Rng &rng)
{
    std::string text;
    std::vector<Site> sites;
    std::set<Site> used;
    const std::size_t trees = 1 + rng.below(5);
    for (std::size_t t = 0; t < trees; ++t) {
        const std::string root = "r" + std::to_string(t);
        text += "INPUT(" + root + ")\n";
        Site at{static_cast<int>(t) * 40, static_cast<int>(rng.below(5))};
        sites.push_back(at);
        used.insert(at);
        std::vector<std::pair<std::string, Site>> frontier{{root, at}};
        const std::size_t size = 1 + rng.below(8);
        for (std::size_t k = 0; k < size; ++k) {
            const auto [parent, where] = frontier[rng.below(frontier.size())];
            const int step = 1 << rng.below(3);
            const Site dirs[4] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
            const Site next{where.x + dirs[rng.below(4)].x, where.y + dirs[rng.below(4)].y};
            if (used.count(next))
                continue;
            const std::string name = "n" + std::to_string(t) + "_" + std::to_string(k);
            text += name + " = NOT(" + parent + ")\n";
            sites.push_back(next);
            used.insert(next);
            frontier.emplace_back(name, next);
        }
    }
    NetlistGraph g = parse_bench(text);
    Placement pl = fixtures::at_sites(g, sites);
    return {std::move(g), std::move(pl)};
}

Outcome attack_sanity()
{
    Rng rng(909);
    std::size_t worse = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const NetlistGraph g = fixtures::random_dag({1 + rng.below(8), 5 + rng.below(60), 1 + rng.below(6)}, rng.next());
        const FeolView view = feol_view(g, fixtures::random_layout(g, 15, 15, rng.next()));
        worse += assignment_attack(view).assignment_cost > greedy_proximity_attack(view).wire_cost;
    }

    std::size_t layouts = 0, greedy_miss = 0, assignment_miss = 0;
    for (int tries = 0; layouts < 100 && tries < 100000; ++tries) {
        const auto [g, pl] = nearest_truth_candidate(rng);
        if (g.edges().empty() || !nearest_is_truth(g, pl))
            continue;
        ++layouts;
        const FeolView view = feol_view(g, pl);
        const auto truth = ground_truth(g);
        greedy_miss += score(truth, greedy_proximity_attack(view).recovered).rate != 1.0;
        assignment_miss += score(truth, assignment_attack(view).recovered).rate != 1.0;
    }
    return {worse == 0 && layouts == 100 && greedy_miss == 0 && assignment_miss == 0,
            fmt("assignment > greedy cost on %zu/100 views; rate < 1 on %zu (greedy) / %zu (assignment) of %zu "
                "nearest-is-truth layouts",
                worse, greedy_miss, assignment_miss, layouts)};
}

// ---- harness ---------------------------------------------------------------

std::string slurp(const std::filesystem::path &p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome determinism()
{
    const auto root = std::filesystem::temp_directory_path() / "splitsec_acceptance_determinism";
    std::filesystem::remove_all(root);
    std::filesystem::create_directories(root);
    std::ofstream(root / "dag.bench") << fixtures::random_bench({10, 150, 8}, 17);

    ExperimentConfig cfg;
    cfg.benches = {fixtures::data_dir() / "full_adder.bench", root / "dag.bench"};
    cfg.techniques = {Technique::None, Technique::Random, Technique::GColor, Technique::GType1, Technique::GType2};
    cfg.seeds = {0, 1, 2};
    cfg.attacks = {AttackKind::Greedy, AttackKind::Assignment};
    cfg.effort = 20;
    cfg.out_dir = root / "a";
    run_pipeline(cfg);
    cfg.out_dir = root / "b";
    cfg.jobs = 4;
    run_pipeline(cfg);
    const std::string a = slurp(root / "a" / "report.csv"), b = slurp(root / "b" / "report.csv");
    const bool json_same = slurp(root / "a" / "report.json") == slurp(root / "b" / "report.json");
    return {!a.empty() && a == b && json_same, fmt("report.csv %zu bytes, identical: %s; report.json identical: %s",
                                                   a.size(), a == b ? "yes" : "no", json_same ? "yes" : "no")};
}

// ---- ISCAS-85 --------------------------------------------------------------

struct TableRow {
    const char *name;
    NetlistStats expected;
};

constexpr TableRow kTable[] = {
    {"c432", {36, 7, 160}},     {"c880", {60, 26, 383}},     {"c1908", {33, 25, 880}},
    {"c2670", {233, 140, 1193}}, {"c5315", {178, 123, 2307}}, {"c7552", {207, 108, 3512}},
};

constexpr std::size_t kTrendEffort = 1000;

Outcome parser_fidelity(const std::filesystem::path &dir)
{
    std::string detail;
    bool pass = true;
    for (const TableRow &row : kTable) {
        const auto start = std::chrono::steady_clock::now();
        const NetlistStats s = stats(load_bench(dir / (std::string(row.name) + ".bench")));
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool ok = s == row.expected && seconds < 1.0;
        pass = pass && ok;
        detail += fmt("%s %zu/%zu/%zu%s ", row.name, s.input_count, s.output_count, s.gate_count,
                      ok ? "" : (seconds < 1.0 ? " (mismatch)" : " (slow)"));
    }
    return {pass, detail};
}

Outcome shuffle_trend(const std::filesystem::path &dir)
{
    SweepConfig cfg;
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.effort = kTrendEffort;
    const SweepReport r = mi_vs_attack_sweep(load_bench(dir / "c432.bench"), "c432", cfg);
    return {r.correlation >= 0.8,
            fmt("Pearson(normalized MI, greedy rate) = %.4f over 11 fraction means (>= 0.8); pooled %.4f",
                r.correlation, r.pooled_correlation)};
}

Outcome protection_direction(const std::filesystem::path &dir)
{
    ExperimentConfig cfg;
    cfg.benches = {dir / "c432.bench", dir / "c880.bench", dir / "c1908.bench"};
    cfg.techniques = {Technique::None, Technique::Random, Technique::GColor, Technique::GType1, Technique::GType2};
    cfg.seeds = {0, 1, 2, 3, 4};
    cfg.effort = kTrendEffort;
    cfg.jobs = std::max(1u, std::thread::hardware_concurrency());
    const ExperimentReport report = run_pipeline(cfg);
    for (const RowResult &row : report.rows)
        if (!row.ok)
            return {false, row.benchmark + " " + std::string(technique_name(row.technique)) + ": " + row.error};

    const TechniqueAggregate *none = nullptr;
    for (const TechniqueAggregate &a : report.aggregates)
        if (a.technique == Technique::None)
            none = &a;
    bool pass = none != nullptr;
    std::string detail;
    for (const TechniqueAggregate &a : report.aggregates) {
        if (a.technique == Technique::None)
            continue;
        const double floor = a.technique == Technique::Random ? 70.0 : 40.0;
        const double ratio = none && none->mean_rate > 0 ? a.mean_rate / none->mean_rate : 1.0;
        pass = pass && a.mean_mi_reduction >= floor && ratio <= 0.6;
        detail += fmt("%s MI -%.1f%% (>= %.0f) rate x%.3f; ", std::string(technique_name(a.technique)).c_str(),
                      a.mean_mi_reduction, floor, ratio);
    }
    return {pass, detail + "rate bound x0.6"};
}

std::filesystem::path default_bench_dir()
{
    if (const char *env = std::getenv("SPLITSEC_BENCH_DIR"); env && *env)
        return env;
#ifdef SPLITSEC_DEFAULT_BENCH_DIR
    return SPLITSEC_DEFAULT_BENCH_DIR;
#else
    return "benchmarks/iscas85";
#endif
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"acceptance criteria"};
    app.require_subcommand(1);
    std::vector<int> only;
    app.add_option("--only", only, "criterion ids to run")->delimiter(',');
    CLI::App *core = app.add_subcommand("core", "criteria without external data");
    CLI::App *iscas = app.add_subcommand("iscas", "criteria on ISCAS-85 benchmark files");
    std::filesystem::path bench_dir = default_bench_dir();
    iscas->add_option("--bench-dir", bench_dir, "directory holding c432.bench etc.");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> filter(only.begin(), only.end());

    if (core->parsed())
        return run_all({{2, "MI oracle equivalence", 5, mi_oracle},
                        {3, "hand-computed MI cases", 1, hand_cases},
                        {4, "MI symmetry identity", 60, symmetry},
                        {5, "coloring invariants", 10, coloring_invariants},
                        {6, "fence containment", 60, fence_containment},
                        {9, "attack sanity", 60, attack_sanity},
                        {10, "pipeline determinism", 60, determinism}},
                       filter);

    std::vector<std::string> missing;
    for (const TableRow &row : kTable)
        if (!std::filesystem::exists(bench_dir / (std::string(row.name) + ".bench")))
            missing.push_back(row.name);
    if (!missing.empty()) {
        std::printf("SKIP  ISCAS-85 files not found in %s (missing", bench_dir.string().c_str());
        for (const std::string &m : missing)
            std::printf(" %s", m.c_str());
        std::printf("); see scripts/fetch_benchmarks.py\n");
        return kSkip;
    }
    std::printf("bench dir: %s\n", bench_dir.string().c_str());
    return run_all({{1, "parser fidelity", 6, [&] { return parser_fidelity(bench_dir); }},
                    {7, "MI vs attack trend", 120, [&] { return shuffle_trend(bench_dir); }},
                    {8, "protection direction", 600, [&] { return protection_direction(bench_dir); }}},
                   filter);
}
