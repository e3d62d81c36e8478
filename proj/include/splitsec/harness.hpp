#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "leakage.hpp"
#include "netlist.hpp"

namespace splitsec {

// `Random` is the randomisation baseline: identity partition, placed, then
// every cell shuffled.
enum class Technique : std::uint8_t { None, Random, GColor, GType1, GType2 };
enum class AttackKind : std::uint8_t { Greedy, Assignment };

std::string_view technique_name(Technique technique);
std::optional<Technique> technique_from_name(std::string_view name);
std::string_view attack_name(AttackKind attack);
std::optional<AttackKind> attack_from_name(std::string_view name);

struct ExperimentConfig {
    std::vector<std::filesystem::path> benches;
    std::vector<Technique> techniques;
    std::vector<std::uint64_t> seeds;
    double utilization = 0.8;
    int bin_width = 1;
    std::size_t effort = 100;
    std::vector<AttackKind> attacks{AttackKind::Greedy};
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    bool include_pads = true;

    // Throws ConfigError.
    void validate() const;
};

struct AttackSummary {
    AttackKind attack = AttackKind::Greedy;
    std::size_t correct = 0;
    std::size_t total = 0;
    double rate = 0;
    long wire_cost = 0;
};

struct RowResult {
    std::string benchmark;
    Technique technique = Technique::None;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    std::size_t partitions = 0;
    LeakageReport leakage;
    std::vector<AttackSummary> attacks; // in config order
    long total_hpwl = 0;
    long die_area = 0;
    double seconds = 0; // wall clock; kept out of the deterministic outputs
};

struct TechniqueAggregate {
    Technique technique = Technique::None;
    std::size_t benchmarks = 0;          // benchmarks with both this and a `none` row
    double mean_mi = 0;
    double mean_mi_reduction = 0;        // percent, averaged over benchmarks
    double mean_rate = 0;                // first configured attack
    double mean_rate_ratio = 0;          // rate / rate(none), averaged over benchmarks
    std::optional<double> mean_rate_reduction_factor; // rate(none) / rate; empty when a rate is 0
};

struct ExperimentReport {
    std::vector<RowResult> rows; // ordered by (benchmark, technique, seed) as configured
    std::vector<TechniqueAggregate> aggregates;
};

RowResult run_row(const NetlistGraph &graph, const std::string &benchmark, Technique technique,
                  std::uint64_t seed, const ExperimentConfig &config);

// Runs every (benchmark, technique, seed) row on `config.jobs` workers. Row
// failures are recorded in the row. Writes report.json, report.csv and
// timings.csv into config.out_dir when it is set.
ExperimentReport run_pipeline(const ExperimentConfig &config);

std::vector<TechniqueAggregate> aggregate(const std::vector<RowResult> &rows);

std::string report_csv(const ExperimentReport &report);
std::string report_json(const ExperimentReport &report);
std::string timings_csv(const ExperimentReport &report);
ExperimentReport report_from_json(std::string_view text);
void write_report(const ExperimentReport &report, const std::filesystem::path &dir);

struct Table2 {
    std::vector<Technique> columns;
    std::vector<std::string> benchmarks;
    std::vector<std::vector<std::optional<double>>> reduction; // [benchmark][column], percent
    std::vector<std::optional<double>> average;                 // per column
};

// Per benchmark and technique: 100 * (1 - MI / MI(none)) on seed-averaged MI.
// Throws Error when a benchmark has no successful `none` row.
Table2 table2_report(const std::vector<RowResult> &rows);
std::string table2_csv(const Table2 &table);

struct SweepConfig {
    std::vector<std::uint64_t> seeds{0};
    std::size_t steps = 11;
    double utilization = 0.8;
    int bin_width = 1;
    std::size_t effort = 100;
    bool include_pads = true;
};

struct SweepPoint {
    std::uint64_t seed = 0;
    double fraction = 0;
    double mi = 0;
    double normalized_mi = 0;
    double rate = 0;
    long total_hpwl = 0;
};

struct SweepReport {
    std::string benchmark;
    std::vector<SweepPoint> points; // seed-major
    std::vector<double> fractions;
    std::vector<double> mean_normalized_mi; // per fraction
    std::vector<double> mean_rate;          // per fraction
    double correlation = 0;                 // Pearson over the per-fraction means
    double pooled_correlation = 0;          // Pearson over every point
};

// Shuffles the unprotected placement of each seed in equal fraction steps from
// 0 to 1 and measures normalised MI and the greedy attack's rate at each step.
SweepReport mi_vs_attack_sweep(const NetlistGraph &graph, const std::string &benchmark, const SweepConfig &config);
std::string sweep_csv(const SweepReport &report);

} // namespace splitsec
