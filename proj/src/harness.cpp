#include "splitsec/harness.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "splitsec/attack.hpp"
#include "splitsec/error.hpp"
#include "splitsec/layout.hpp"
#include "splitsec/protect.hpp"
#include "splitsec/rng.hpp"
#include "splitsec/serialize.hpp"
#include "splitsec/stats.hpp"

namespace splitsec {

namespace {

// Independent random streams drawn from one row seed.
enum Stream : std::uint64_t { PartitionStream = 1, PlaceStream = 2, ShuffleStream = 3, SweepStream = 100 };

constexpr std::array<std::string_view, 5> kTechniqueNames = {"none", "random", "g_color", "g_type1", "g_type2"};
constexpr std::array<std::string_view, 2> kAttackNames = {"greedy", "assignment"};

Partitioning partition_for(const NetlistGraph &graph, Technique technique, std::uint64_t seed)
{
    switch (technique) {
    case Technique::None:
    case Technique::Random:
        return identity_partition(graph);
    case Technique::GColor:
        return g_color(graph, seed);
    case Technique::GType1:
        return g_type(graph, GTypeFlavor::KindOnly, seed);
    case Technique::GType2:
        return g_type(graph, GTypeFlavor::KindAndFanin, seed);
    }
    throw InvariantError("unknown technique");
}

Placement unprotected_placement(const NetlistGraph &graph, std::uint64_t seed, double utilization, std::size_t effort)
{
    const Partitioning p = identity_partition(graph);
    const FencePlan plan = floorplan(p, graph, utilization);
    return place(graph, plan, derive_seed(seed, PlaceStream), effort);
}

AttackResult run_attack(AttackKind kind, const FeolView &view)
{
    return kind == AttackKind::Greedy ? greedy_proximity_attack(view) : assignment_attack(view);
}

std::string fixed2(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::vector<AttackKind> attack_columns(const std::vector<RowResult> &rows)
{
    std::vector<AttackKind> kinds;
    for (const RowResult &r : rows)
        for (const AttackSummary &a : r.attacks)
            if (std::find(kinds.begin(), kinds.end(), a.attack) == kinds.end())
                kinds.push_back(a.attack);
    return kinds;
}

template <class T>
void push_unique(std::vector<T> &v, const T &x)
{
    if (std::find(v.begin(), v.end(), x) == v.end())
        v.push_back(x);
}

// Seed-averaged values of successful rows per (benchmark, technique).
struct CellMeans {
    double mi = 0;
    double rate = 0;
};

std::map<std::pair<std::string, Technique>, CellMeans> cell_means(const std::vector<RowResult> &rows)
{
    std::map<std::pair<std::string, Technique>, std::pair<CellMeans, std::size_t>> sums;
    for (const RowResult &r : rows) {
        if (!r.ok)
            continue;
        auto &[m, n] = sums[{r.benchmark, r.technique}];
        m.mi += r.leakage.mi;
        m.rate += r.attacks.empty() ? 0.0 : r.attacks.front().rate;
        ++n;
    }
    std::map<std::pair<std::string, Technique>, CellMeans> means;
    for (const auto &[key, value] : sums)
        means[key] = {value.first.mi / static_cast<double>(value.second),
                      value.first.rate / static_cast<double>(value.second)};
    return means;
}

void write_file(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write '" + path.string() + "'");
    out << text;
}

} // namespace

std::string_view technique_name(Technique technique) { return kTechniqueNames[static_cast<std::size_t>(technique)]; }

std::optional<Technique> technique_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kTechniqueNames.size(); ++i)
        if (kTechniqueNames[i] == name)
            return static_cast<Technique>(i);
    return std::nullopt;
}

std::string_view attack_name(AttackKind attack) { return kAttackNames[static_cast<std::size_t>(attack)]; }

std::optional<AttackKind> attack_from_name(std::string_view name)
{
    for (std::size_t i = 0; i < kAttackNames.size(); ++i)
        if (kAttackNames[i] == name)
            return static_cast<AttackKind>(i);
    return std::nullopt;
}

void ExperimentConfig::validate() const
{
    if (benches.empty())
        throw ConfigError("no benchmark given");
    if (techniques.empty())
        throw ConfigError("no technique given");
    if (seeds.empty())
        throw ConfigError("no seed given");
    if (attacks.empty())
        throw ConfigError("no attack given");
    if (!(utilization > 0.0 && utilization <= 1.0))
        throw ConfigError("utilization must be in (0, 1]");
    if (bin_width < 1)
        throw ConfigError("bin width must be at least 1");
    if (jobs == 0)
        throw ConfigError("jobs must be at least 1");
}

RowResult run_row(const NetlistGraph &graph, const std::string &benchmark, Technique technique, std::uint64_t seed,
                  const ExperimentConfig &config)
{
    RowResult row;
    row.benchmark = benchmark;
    row.technique = technique;
    row.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    try {
        const Partitioning p = partition_for(graph, technique, derive_seed(seed, PartitionStream));
        validate_partitioning(graph, p);
        row.partitions = p.size();
        const FencePlan plan = floorplan(p, graph, config.utilization);
        validate_fence_plan(graph, plan);
        Placement pl = place(graph, plan, derive_seed(seed, PlaceStream), config.effort);
        validate_placement(graph, pl);
        if (technique == Technique::Random) {
            pl = shuffle(graph, pl, 1.0, derive_seed(seed, ShuffleStream));
            validate_placement(graph, pl, false);
        }
        row.leakage = mutual_information(joint_distribution(graph, pl, config.bin_width, config.include_pads));
        const WirelengthReport wl = hpwl(graph, pl);
        row.total_hpwl = wl.total_hpwl;
        row.die_area = wl.die_area;

        const FeolView view = feol_view(graph, pl);
        const auto truth = ground_truth(graph);
        for (AttackKind kind : config.attacks) {
            AttackResult r = run_attack(kind, view);
            if (!recovery_is_well_formed(view, r))
                throw InvariantError(std::string(attack_name(kind)) + " attack produced a malformed netlist");
            apply_score(r, truth);
            row.attacks.push_back({kind, r.correct, r.total, r.rate, r.wire_cost});
        }
        row.ok = true;
    } catch (const Error &e) {
        row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return row;
}

ExperimentReport run_pipeline(const ExperimentConfig &config)
{
    config.validate();
    std::vector<std::pair<std::string, NetlistGraph>> benches;
    for (const auto &path : config.benches)
        benches.emplace_back(path.stem().string(), load_bench(path));

    struct Task {
        std::size_t bench;
        Technique technique;
        std::uint64_t seed;
    };
    std::vector<Task> tasks;
    for (std::size_t b = 0; b < benches.size(); ++b)
        for (Technique t : config.techniques)
            for (std::uint64_t s : config.seeds)
                tasks.push_back({b, t, s});

    ExperimentReport report;
    report.rows.resize(tasks.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_lock;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                const Task &t = tasks[i];
                report.rows[i] = run_row(benches[t.bench].second, benches[t.bench].first, t.technique, t.seed, config);
            } catch (...) {
                std::lock_guard lock(failure_lock);
                if (!failure)
                    failure = std::current_exception();
            }
        }
    };
    const unsigned workers = std::min<unsigned>(config.jobs, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    report.aggregates = aggregate(report.rows);
    if (!config.out_dir.empty())
        write_report(report, config.out_dir);
    return report;
}

std::vector<TechniqueAggregate> aggregate(const std::vector<RowResult> &rows)
{
    std::vector<std::string> benches;
    std::vector<Technique> techniques;
    for (const RowResult &r : rows) {
        push_unique(benches, r.benchmark);
        push_unique(techniques, r.technique);
    }
    const auto means = cell_means(rows);

    std::vector<TechniqueAggregate> out;
    for (Technique t : techniques) {
        TechniqueAggregate agg;
        agg.technique = t;
        double mi = 0, reduction = 0, rate = 0, ratio = 0, factor = 0;
        std::size_t ratio_count = 0;
        bool factor_defined = true;
        for (const std::string &b : benches) {
            auto base = means.find({b, Technique::None});
            auto cell = means.find({b, t});
            if (base == means.end() || cell == means.end())
                continue;
            ++agg.benchmarks;
            mi += cell->second.mi;
            reduction += mi_reduction_percent(cell->second.mi, base->second.mi);
            rate += cell->second.rate;
            if (base->second.rate > 0) {
                ratio += cell->second.rate / base->second.rate;
                ++ratio_count;
            }
            if (cell->second.rate > 0)
                factor += base->second.rate / cell->second.rate;
            else
                factor_defined = false;
        }
        if (agg.benchmarks > 0) {
            const auto n = static_cast<double>(agg.benchmarks);
            agg.mean_mi = mi / n;
            agg.mean_mi_reduction = reduction / n;
            agg.mean_rate = rate / n;
            if (ratio_count > 0)
                agg.mean_rate_ratio = ratio / static_cast<double>(ratio_count);
            if (factor_defined)
                agg.mean_rate_reduction_factor = factor / n;
        }
        out.push_back(agg);
    }
    return out;
}

std::string report_csv(const ExperimentReport &report)
{
    const auto attacks = attack_columns(report.rows);
    std::string out = "benchmark,technique,seed,ok,partitions,h_x,mi,normalized_mi,total_hpwl,die_area";
    for (AttackKind a : attacks) {
        const std::string name(attack_name(a));
        out += "," + name + "_correct," + name + "_total," + name + "_rate," + name + "_wire_cost";
    }
    out += ",error\n";
    for (const RowResult &r : report.rows) {
        out += r.benchmark + "," + std::string(technique_name(r.technique)) + "," + std::to_string(r.seed) + "," +
               (r.ok ? "1" : "0") + "," + std::to_string(r.partitions) + "," + format_number(r.leakage.h_x) + "," +
               format_number(r.leakage.mi) + "," + format_number(r.leakage.normalized_mi) + "," +
               std::to_string(r.total_hpwl) + "," + std::to_string(r.die_area);
        for (AttackKind a : attacks) {
            auto it = std::find_if(r.attacks.begin(), r.attacks.end(), [&](const AttackSummary &s) { return s.attack == a; });
            if (it == r.attacks.end())
                out += ",,,,";
            else
                out += "," + std::to_string(it->correct) + "," + std::to_string(it->total) + "," +
                       format_number(it->rate) + "," + std::to_string(it->wire_cost);
        }
        std::string error = r.error;
        std::replace(error.begin(), error.end(), '"', '\'');
        out += error.empty() ? ",\n" : ",\"" + error + "\"\n";
    }
    return out;
}

std::string report_json(const ExperimentReport &report)
{
    Json rows = Json::array();
    for (const RowResult &r : report.rows) {
        Json attacks = Json::array();
        for (const AttackSummary &a : r.attacks)
            attacks.push_back({{"attack", attack_name(a.attack)},
                               {"correct", a.correct},
                               {"total", a.total},
                               {"rate", a.rate},
                               {"wire_cost", a.wire_cost}});
        rows.push_back({{"benchmark", r.benchmark},
                        {"technique", technique_name(r.technique)},
                        {"seed", r.seed},
                        {"ok", r.ok},
                        {"error", r.error},
                        {"partitions", r.partitions},
                        {"leakage", to_json(r.leakage)},
                        {"attacks", attacks},
                        {"total_hpwl", r.total_hpwl},
                        {"die_area", r.die_area}});
    }
    Json aggregates = Json::array();
    for (const TechniqueAggregate &a : report.aggregates) {
        Json j = {{"technique", technique_name(a.technique)},
                  {"benchmarks", a.benchmarks},
                  {"mean_mi", a.mean_mi},
                  {"mean_mi_reduction", a.mean_mi_reduction},
                  {"mean_rate", a.mean_rate},
                  {"mean_rate_ratio", a.mean_rate_ratio}};
        j["mean_rate_reduction_factor"] = a.mean_rate_reduction_factor ? Json(*a.mean_rate_reduction_factor) : Json(nullptr);
        aggregates.push_back(j);
    }
    return Json{{"rows", rows}, {"aggregates", aggregates}}.dump(2) + "\n";
}

std::string timings_csv(const ExperimentReport &report)
{
    std::string out = "benchmark,technique,seed,seconds\n";
    for (const RowResult &r : report.rows)
        out += r.benchmark + "," + std::string(technique_name(r.technique)) + "," + std::to_string(r.seed) + "," +
               fixed2(r.seconds) + "\n";
    return out;
}

ExperimentReport report_from_json(std::string_view text)
{
    try {
        const Json json = Json::parse(text);
        ExperimentReport report;
        auto technique = [](const Json &j) {
            auto t = technique_from_name(j.get<std::string>());
            if (!t)
                throw Error("unknown technique '" + j.get<std::string>() + "'");
            return *t;
        };
        for (const Json &j : json.at("rows")) {
            RowResult r;
            r.benchmark = j.at("benchmark").get<std::string>();
            r.technique = technique(j.at("technique"));
            r.seed = j.at("seed").get<std::uint64_t>();
            r.ok = j.at("ok").get<bool>();
            r.error = j.value("error", std::string{});
            r.partitions = j.value("partitions", std::size_t{0});
            const Json &l = j.at("leakage");
            r.leakage = {l.at("h_x").get<double>(), l.at("h_x_given_d").get<double>(), l.at("mi").get<double>(),
                         l.at("normalized_mi").get<double>()};
            for (const Json &a : j.at("attacks")) {
                auto kind = attack_from_name(a.at("attack").get<std::string>());
                if (!kind)
                    throw Error("unknown attack '" + a.at("attack").get<std::string>() + "'");
                r.attacks.push_back({*kind, a.at("correct").get<std::size_t>(), a.at("total").get<std::size_t>(),
                                     a.at("rate").get<double>(), a.at("wire_cost").get<long>()});
            }
            r.total_hpwl = j.value("total_hpwl", 0L);
            r.die_area = j.value("die_area", 0L);
            report.rows.push_back(std::move(r));
        }
        if (json.contains("aggregates")) {
            for (const Json &j : json.at("aggregates")) {
                TechniqueAggregate a;
                a.technique = technique(j.at("technique"));
                a.benchmarks = j.at("benchmarks").get<std::size_t>();
                a.mean_mi = j.at("mean_mi").get<double>();
                a.mean_mi_reduction = j.at("mean_mi_reduction").get<double>();
                a.mean_rate = j.at("mean_rate").get<double>();
                a.mean_rate_ratio = j.at("mean_rate_ratio").get<double>();
                if (!j.at("mean_rate_reduction_factor").is_null())
                    a.mean_rate_reduction_factor = j.at("mean_rate_reduction_factor").get<double>();
                report.aggregates.push_back(a);
            }
        }
        return report;
    } catch (const Json::exception &e) {
        throw Error(std::string("malformed report: ") + e.what());
    }
}

void write_report(const ExperimentReport &report, const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw Error("cannot create '" + dir.string() + "': " + ec.message());
    write_file(dir / "report.json", report_json(report));
    write_file(dir / "report.csv", report_csv(report));
    write_file(dir / "timings.csv", timings_csv(report));
}

Table2 table2_report(const std::vector<RowResult> &rows)
{
    Table2 table;
    for (const RowResult &r : rows) {
        push_unique(table.benchmarks, r.benchmark);
        if (r.technique != Technique::None)
            push_unique(table.columns, r.technique);
    }
    const auto means = cell_means(rows);
    std::vector<double> sums(table.columns.size(), 0);
    std::vector<std::size_t> counts(table.columns.size(), 0);
    for (const std::string &b : table.benchmarks) {
        auto base = means.find({b, Technique::None});
        if (base == means.end())
            throw Error("benchmark '" + b + "' has no successful none row");
        auto &line = table.reduction.emplace_back(table.columns.size());
        for (std::size_t c = 0; c < table.columns.size(); ++c) {
            auto cell = means.find({b, table.columns[c]});
            if (cell == means.end())
                continue;
            line[c] = mi_reduction_percent(cell->second.mi, base->second.mi);
            sums[c] += *line[c];
            ++counts[c];
        }
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c)
        table.average.push_back(counts[c] ? std::optional(sums[c] / static_cast<double>(counts[c])) : std::nullopt);
    return table;
}

std::string table2_csv(const Table2 &table)
{
    std::string out = "benchmark";
    for (Technique t : table.columns)
        out += "," + std::string(technique_name(t));
    out += "\n";
    auto line = [&](const std::string &name, const std::vector<std::optional<double>> &values) {
        out += name;
        for (const auto &v : values)
            out += "," + (v ? fixed2(*v) : std::string{});
        out += "\n";
    };
    for (std::size_t b = 0; b < table.benchmarks.size(); ++b)
        line(table.benchmarks[b], table.reduction[b]);
    line("average", table.average);
    return out;
}

SweepReport mi_vs_attack_sweep(const NetlistGraph &graph, const std::string &benchmark, const SweepConfig &config)
{
    if (config.seeds.empty())
        throw ConfigError("no seed given");
    if (config.steps < 2)
        throw ConfigError("a sweep needs at least two steps");
    if (config.bin_width < 1)
        throw ConfigError("bin width must be at least 1");

    SweepReport report;
    report.benchmark = benchmark;
    for (std::size_t i = 0; i < config.steps; ++i)
        report.fractions.push_back(static_cast<double>(i) / static_cast<double>(config.steps - 1));
    report.mean_normalized_mi.assign(config.steps, 0);
    report.mean_rate.assign(config.steps, 0);

    const auto truth = ground_truth(graph);
    for (std::uint64_t seed : config.seeds) {
        const Placement base = unprotected_placement(graph, seed, config.utilization, config.effort);
        for (std::size_t i = 0; i < config.steps; ++i) {
            const double fraction = report.fractions[i];
            const Placement pl = shuffle(graph, base, fraction, derive_seed(seed, SweepStream + i));
            const LeakageReport leak =
                mutual_information(joint_distribution(graph, pl, config.bin_width, config.include_pads));
            AttackResult attack = greedy_proximity_attack(feol_view(graph, pl));
            apply_score(attack, truth);
            report.points.push_back({seed, fraction, leak.mi, leak.normalized_mi, attack.rate, hpwl(graph, pl).total_hpwl});
            report.mean_normalized_mi[i] += leak.normalized_mi;
            report.mean_rate[i] += attack.rate;
        }
    }
    const auto seeds = static_cast<double>(config.seeds.size());
    for (std::size_t i = 0; i < config.steps; ++i) {
        report.mean_normalized_mi[i] /= seeds;
        report.mean_rate[i] /= seeds;
    }
    report.correlation = pearson(report.mean_normalized_mi, report.mean_rate);
    std::vector<double> mi, rate;
    for (const SweepPoint &p : report.points) {
        mi.push_back(p.normalized_mi);
        rate.push_back(p.rate);
    }
    report.pooled_correlation = pearson(mi, rate);
    return report;
}

std::string sweep_csv(const SweepReport &report)
{
    std::string out = "benchmark,seed,fraction,mi,normalized_mi,rate,total_hpwl\n";
    for (const SweepPoint &p : report.points)
        out += report.benchmark + "," + std::to_string(p.seed) + "," + fixed2(p.fraction) + "," + format_number(p.mi) +
               "," + format_number(p.normalized_mi) + "," + format_number(p.rate) + "," + std::to_string(p.total_hpwl) +
               "\n";
    return out;
}

} // namespace splitsec
