#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "netlist.hpp"

namespace splitsec {

enum class PartitionTechnique : std::uint8_t { None, GColor, GType1, GType2 };

std::string_view technique_name(PartitionTechnique technique);
std::optional<PartitionTechnique> partition_technique_from_name(std::string_view name);

struct Partition {
    std::uint32_t id = 0;
    std::string label;
    std::vector<GateId> members; // ascending gate id
};

struct Partitioning {
    PartitionTechnique technique = PartitionTechnique::None;
    std::uint64_t seed = 0;
    std::vector<std::uint32_t> assignment; // gate id -> partition id, total
    std::vector<Partition> partitions;     // ids dense from 0, none empty

    std::size_t size() const { return partitions.size(); }
};

// One g-color decision, recorded for the balance check.
struct ColorChoice {
    GateId gate = 0;
    std::vector<std::uint32_t> feasible;       // existing colours allowed at choice time
    std::vector<std::size_t> feasible_sizes;   // class sizes of `feasible` at choice time
    std::uint32_t chosen = 0;
    bool fresh = false;                        // a new colour had to be opened
};

// Balanced greedy colouring. A gate may not share a colour with any neighbour
// nor with any other sink of one of its drivers. Among the feasible colours
// the one with the fewest members wins, ties to the lowest id.
Partitioning g_color(const NetlistGraph &graph, std::uint64_t seed,
                     std::vector<ColorChoice> *trace = nullptr);

enum class GTypeFlavor : std::uint8_t { KindOnly = 1, KindAndFanin = 2 };

// Key a gate's type partition: "NAND" (flavor 1) or "NAND3" (flavor 2).
std::string type_key(const Gate &gate, GTypeFlavor flavor);

// Clusters gates by type key. BUF/NOT gates are spread uniformly at random
// over the type partitions; pads form INPUT and OUTPUT partitions. Throws
// Error when BUF/NOT gates exist but there is no type partition to take them.
Partitioning g_type(const NetlistGraph &graph, GTypeFlavor flavor, std::uint64_t seed);

// Single partition holding every gate. Throws Error on an empty netlist.
Partitioning identity_partition(const NetlistGraph &graph);

// Checks the generic Partitioning invariants; throws InvariantError.
void validate_partitioning(const NetlistGraph &graph, const Partitioning &partitioning);

} // namespace splitsec
