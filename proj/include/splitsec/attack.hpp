#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "layout.hpp"
#include "netlist.hpp"

namespace splitsec {

struct PinRef {
    GateId cell = 0;
    std::uint32_t pin = 0;

    auto operator<=>(const PinRef &) const = default;
};

struct RecoveredEdge {
    GateId driver = 0;
    PinRef sink;

    auto operator<=>(const RecoveredEdge &) const = default;
};

struct FeolCell {
    GateId id = 0;
    std::string name;
    GateKind kind = GateKind::Buf;
    std::uint32_t fanin = 0;
    Site site;
};

// What the FEOL foundry sees after an M1 split: placed cells with their
// library pins and no nets at all.
struct FeolView {
    std::vector<FeolCell> cells;      // indexed by gate id
    std::vector<PinRef> open_sinks;   // every input pin of every cell and PO pad
    std::vector<GateId> open_drivers; // every cell with an output, i.e. all but PO pads
};

struct AttackResult {
    std::string attack;
    std::vector<RecoveredEdge> recovered; // sorted by sink
    std::vector<PinRef> unresolved;
    long wire_cost = 0;       // sum of recovered edge distances
    long assignment_cost = 0; // pre-repair cost (assignment attack); equals wire_cost for greedy
    std::size_t correct = 0;
    std::size_t total = 0;
    double rate = 0;
};

struct Score {
    std::size_t correct = 0;
    std::size_t total = 0;
    double rate = 0;
};

FeolView feol_view(const NetlistGraph &graph, const Placement &placement);

// The hidden BEOL connectivity as recovered edges, sorted by sink.
std::vector<RecoveredEdge> ground_truth(const NetlistGraph &graph);

// Sinks in (cell name, pin) order each take the nearest legal driver: not the
// sink cell itself and not closing a combinational loop among the edges
// recovered so far. Distance ties go to the lexicographically smaller name.
AttackResult greedy_proximity_attack(const FeolView &view);

struct AssignmentOptions {
    // 0 = unbounded driver fan-out
    std::size_t max_fanout = 0;
    // with a fan-out cap, each sink considers this many nearest drivers (plus
    // every primary input); ignored when unbounded
    std::size_t candidates = 48;
};

// Global min-cost assignment of sinks to drivers by Manhattan distance,
// followed by cycle repair: while the recovered graph has a loop, the loop
// edge whose cheapest loop-free alternative adds the least cost is rerouted.
AttackResult assignment_attack(const FeolView &view, const AssignmentOptions &options = {});

// Pin-level scoring: correct = |recovered ∩ truth| by (sink, pin), total = |truth|.
Score score(const std::vector<RecoveredEdge> &truth, const std::vector<RecoveredEdge> &recovered);
void apply_score(AttackResult &result, const std::vector<RecoveredEdge> &truth);

// True when the recovered edges form a DAG with one driver per input pin.
bool recovery_is_well_formed(const FeolView &view, const AttackResult &result);

// Recovered netlist as .bench; unresolved pins read from UNRESOLVED_<n> inputs.
std::string recovered_bench(const FeolView &view, const AttackResult &result);

} // namespace splitsec
