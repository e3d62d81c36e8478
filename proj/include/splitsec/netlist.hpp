#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace splitsec {

using GateId = std::uint32_t;

enum class GateKind : std::uint8_t { And, Nand, Or, Nor, Xor, Xnor, Not, Buf, Input, Output };

// .bench keyword for the kind ("AND", ..., "NOT", "BUFF", "INPUT", "OUTPUT").
std::string_view kind_name(GateKind kind);
std::optional<GateKind> kind_from_keyword(std::string_view keyword);

inline bool is_pad_kind(GateKind kind) { return kind == GateKind::Input || kind == GateKind::Output; }
inline bool is_buf_or_inv(GateKind kind) { return kind == GateKind::Buf || kind == GateKind::Not; }

struct Gate {
    GateId id = 0;
    std::string name;
    GateKind kind = GateKind::Buf;
    std::uint32_t fanin = 0;
    // 1-based source line, 0 for gates built programmatically
    std::size_t line = 0;
};

// driver output -> sink input pin
struct Edge {
    GateId driver = 0;
    GateId sink = 0;
    std::uint32_t pin = 0;

    auto operator<=>(const Edge &) const = default;
};

struct GatePair {
    GateId first = 0;
    GateId second = 0;

    auto operator<=>(const GatePair &) const = default;
};

struct NetlistStats {
    std::size_t input_count = 0;
    std::size_t output_count = 0;
    std::size_t gate_count = 0;

    auto operator<=>(const NetlistStats &) const = default;
};

// Validated, immutable gate-level DAG. Primary inputs and outputs are pad
// pseudo-gates: an INPUT has no fan-in, an OUTPUT named "PO(sig)" has exactly
// one fan-in edge from the gate driving `sig`. Gate ids are dense indices.
class NetlistGraph {
  public:
    NetlistGraph() = default;

    // Validates every structural invariant; throws ParseError on violation.
    static NetlistGraph build(std::vector<Gate> gates, std::vector<Edge> edges);

    std::size_t size() const { return gates_.size(); }
    bool empty() const { return gates_.empty(); }

    std::span<const Gate> gates() const { return gates_; }
    const Gate &gate(GateId id) const { return gates_[id]; }
    bool is_pad(GateId id) const { return is_pad_kind(gates_[id].kind); }

    // sorted by (sink, pin)
    std::span<const Edge> edges() const { return edges_; }
    // edges into `sink`, ordered by pin
    std::span<const Edge> fanin_edges(GateId sink) const;
    // distinct sinks driven by `driver`, ascending id
    std::span<const GateId> fanout(GateId driver) const;
    // distinct undirected neighbours, ascending id
    std::span<const GateId> neighbors(GateId id) const;

    std::span<const GateId> primary_inputs() const { return inputs_; }
    std::span<const GateId> primary_outputs() const { return outputs_; }

    std::optional<GateId> find(std::string_view name) const;

  private:
    std::vector<Gate> gates_;
    std::vector<Edge> edges_;
    std::vector<std::uint32_t> fanin_offsets_;
    std::vector<std::uint32_t> fanout_offsets_;
    std::vector<GateId> fanout_;
    std::vector<std::uint32_t> neighbor_offsets_;
    std::vector<GateId> neighbors_;
    std::vector<GateId> inputs_;
    std::vector<GateId> outputs_;
    std::unordered_map<std::string, GateId> by_name_;
};

// Name of the pad pseudo-gate for OUTPUT(signal).
std::string output_pad_name(std::string_view signal);

NetlistGraph parse_bench(std::string_view text);
NetlistGraph load_bench(const std::filesystem::path &path);

// Canonical writer: one declaration per gate in id order, so that
// parse_bench(write_bench(g)) reproduces g exactly.
std::string write_bench(const NetlistGraph &graph);

std::vector<GatePair> connected_pairs(const NetlistGraph &graph);
NetlistStats stats(const NetlistGraph &graph);

} // namespace splitsec
