#pragma once

#include <climits>
#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "netlist.hpp"
#include "protect.hpp"

namespace splitsec {

struct Site {
    int x = INT_MIN;
    int y = INT_MIN;

    bool placed() const { return x != INT_MIN; }
    auto operator<=>(const Site &) const = default;
};

inline int manhattan(Site a, Site b) { return (a.x > b.x ? a.x - b.x : b.x - a.x) + (a.y > b.y ? a.y - b.y : b.y - a.y); }

// Half-open site rectangle [x0, x1) x [y0, y1).
struct Rect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;

    int width() const { return x1 - x0; }
    int height() const { return y1 - y0; }
    long area() const { return long(width()) * height(); }
    bool contains(Site s) const { return s.x >= x0 && s.x < x1 && s.y >= y0 && s.y < y1; }
    bool overlaps(const Rect &o) const { return x0 < o.x1 && o.x0 < x1 && y0 < o.y1 && o.y0 < y1; }
    auto operator<=>(const Rect &) const = default;
};

struct PadSite {
    GateId gate = 0;
    Site site;
};

struct FencePlan {
    int die_width = 0;
    int die_height = 0;
    double utilization = 1.0;
    // partition id -> fence; empty for partitions made only of pads
    std::vector<std::optional<Rect>> fences;
    std::vector<std::uint32_t> assignment; // gate id -> partition id
    std::vector<PadSite> io_ring;          // ascending gate id

    long die_area() const { return long(die_width) * die_height; }
};

struct Placement {
    std::vector<Site> sites; // by gate id
    FencePlan fence_plan;
    std::uint64_t seed = 0;
    double utilization = 1.0;
};

struct WirelengthReport {
    long total_hpwl = 0;
    std::vector<std::pair<GateId, long>> per_net_hpwl; // by driver, ascending
    long die_area = 0;
};

// Packs one near-square fence per partition (ceil(cells / utilization) sites)
// row-wise in descending size order inside a core box, surrounded by a ring of
// pad sites holding the PI/PO pseudo-gates evenly spaced in name order.
FencePlan floorplan(const Partitioning &partitioning, const NetlistGraph &graph, double utilization);

// Simulated-annealing placement minimising total HPWL. Cells only move or swap
// within their own fence; pads stay on their ring sites. `effort` is the number
// of temperature steps, each making one move attempt per movable cell; effort 0
// returns the seeded initial placement. The best placement seen is returned.
Placement place(const NetlistGraph &graph, const FencePlan &plan, std::uint64_t seed, std::size_t effort);

// The randomisation baseline: picks ceil(fraction * cells) non-pad cells and
// permutes their sites among themselves, ignoring fences.
Placement shuffle(const NetlistGraph &graph, const Placement &placement, double fraction, std::uint64_t seed);

WirelengthReport hpwl(const NetlistGraph &graph, const Placement &placement);

// Throws Error when either gate is unplaced.
int manhattan(const Placement &placement, GateId u, GateId v);

// Throws InvariantError on overlap, unplaced gates, pads off their ring site,
// or (when check_fences) a cell outside its partition's fence.
void validate_placement(const NetlistGraph &graph, const Placement &placement, bool check_fences = true);

// Throws InvariantError on overlapping fences, fences outside the die or too
// small for their partition.
void validate_fence_plan(const NetlistGraph &graph, const FencePlan &plan);

} // namespace splitsec
