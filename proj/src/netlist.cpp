#include "splitsec/netlist.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <cctype>
#include <sstream>
#include <tuple>

#include "splitsec/error.hpp"

namespace splitsec {

namespace {

constexpr std::array<std::string_view, 10> kKindNames = {
    "AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUFF", "INPUT", "OUTPUT",
};

std::size_t error_line(const std::vector<Gate> &gates, GateId id)
{
    return id < gates.size() ? gates[id].line : 0;
}

} // namespace

std::string_view kind_name(GateKind kind) { return kKindNames[static_cast<std::size_t>(kind)]; }

std::optional<GateKind> kind_from_keyword(std::string_view keyword)
{
    std::string upper(keyword);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    if (upper == "INV")
        return GateKind::Not;
    if (upper == "BUF")
        return GateKind::Buf;
    for (std::size_t i = 0; i < kKindNames.size(); ++i) {
        if (upper == kKindNames[i])
            return static_cast<GateKind>(i);
    }
    return std::nullopt;
}

std::string output_pad_name(std::string_view signal) { return "PO(" + std::string(signal) + ")"; }

NetlistGraph NetlistGraph::build(std::vector<Gate> gates, std::vector<Edge> edges)
{
    NetlistGraph g;
    const std::size_t n = gates.size();

    for (std::size_t i = 0; i < n; ++i) {
        Gate &gate = gates[i];
        if (gate.id != i)
            throw ParseError(gate.line, "gate ids must be dense and ordered (gate '" + gate.name + "')");
        if (gate.name.empty())
            throw ParseError(gate.line, "gate without a name");
        if (!g.by_name_.emplace(gate.name, gate.id).second)
            throw ParseError(gate.line, "duplicate definition of '" + gate.name + "'");
        switch (gate.kind) {
        case GateKind::Input:
            if (gate.fanin != 0)
                throw ParseError(gate.line, "INPUT '" + gate.name + "' cannot have fan-in");
            g.inputs_.push_back(gate.id);
            break;
        case GateKind::Output:
        case GateKind::Not:
        case GateKind::Buf:
            if (gate.fanin != 1)
                throw ParseError(gate.line, std::string(kind_name(gate.kind)) + " '" + gate.name +
                                                    "' must have exactly one input");
            if (gate.kind == GateKind::Output)
                g.outputs_.push_back(gate.id);
            break;
        default:
            if (gate.fanin < 2)
                throw ParseError(gate.line, std::string(kind_name(gate.kind)) + " '" + gate.name +
                                                    "' needs at least two inputs");
        }
    }

    std::sort(edges.begin(), edges.end(), [](const Edge &a, const Edge &b) {
        return std::tie(a.sink, a.pin, a.driver) < std::tie(b.sink, b.pin, b.driver);
    });
    std::vector<std::uint32_t> seen_fanin(n, 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
        const Edge &e = edges[i];
        if (e.driver >= n || e.sink >= n)
            throw ParseError(0, "edge endpoint out of range");
        if (i > 0 && edges[i - 1].sink == e.sink && edges[i - 1].pin == e.pin)
            throw ParseError(error_line(gates, e.sink), "pin " + std::to_string(e.pin) + " of '" +
                                                            gates[e.sink].name + "' has two drivers");
        if (gates[e.driver].kind == GateKind::Output)
            throw ParseError(error_line(gates, e.sink), "output pad '" + gates[e.driver].name + "' cannot drive");
        if (e.pin >= gates[e.sink].fanin)
            throw ParseError(error_line(gates, e.sink), "pin index out of range on '" + gates[e.sink].name + "'");
        ++seen_fanin[e.sink];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (seen_fanin[i] != gates[i].fanin)
            throw ParseError(gates[i].line, "'" + gates[i].name + "' has " + std::to_string(seen_fanin[i]) +
                                                    " connected inputs, expected " +
                                                    std::to_string(gates[i].fanin));
    }

    g.fanin_offsets_.assign(n + 1, 0);
    for (const Edge &e : edges)
        ++g.fanin_offsets_[e.sink + 1];
    for (std::size_t i = 0; i < n; ++i)
        g.fanin_offsets_[i + 1] += g.fanin_offsets_[i];

    std::vector<std::vector<GateId>> fanout(n), adjacency(n);
    for (const Edge &e : edges) {
        fanout[e.driver].push_back(e.sink);
        adjacency[e.driver].push_back(e.sink);
        adjacency[e.sink].push_back(e.driver);
    }
    auto flatten = [n](std::vector<std::vector<GateId>> &lists, std::vector<std::uint32_t> &offsets,
                       std::vector<GateId> &flat) {
        offsets.assign(n + 1, 0);
        for (std::size_t i = 0; i < n; ++i) {
            auto &l = lists[i];
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            offsets[i + 1] = offsets[i] + static_cast<std::uint32_t>(l.size());
            flat.insert(flat.end(), l.begin(), l.end());
        }
    };
    flatten(fanout, g.fanout_offsets_, g.fanout_);
    flatten(adjacency, g.neighbor_offsets_, g.neighbors_);

    // Kahn's algorithm
    std::vector<std::uint32_t> indegree(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        indegree[i] = static_cast<std::uint32_t>(g.fanin_offsets_[i + 1] - g.fanin_offsets_[i]);
    std::vector<GateId> stack;
    for (GateId i = 0; i < n; ++i)
        if (indegree[i] == 0)
            stack.push_back(i);
    std::size_t visited = 0;
    while (!stack.empty()) {
        GateId u = stack.back();
        stack.pop_back();
        ++visited;
        for (std::uint32_t k = g.fanout_offsets_[u]; k < g.fanout_offsets_[u + 1]; ++k) {
            GateId v = g.fanout_[k];
            // parallel edges (same driver on several pins) each count
            for (std::uint32_t j = g.fanin_offsets_[v]; j < g.fanin_offsets_[v + 1]; ++j)
                if (edges[j].driver == u && --indegree[v] == 0)
                    stack.push_back(v);
        }
    }
    if (visited != n) {
        for (GateId i = 0; i < n; ++i)
            if (indegree[i] != 0)
                throw ParseError(0, "combinational cycle through '" + gates[i].name + "' (line " +
                                            std::to_string(gates[i].line) + ")");
    }

    g.gates_ = std::move(gates);
    g.edges_ = std::move(edges);
    return g;
}

std::span<const Edge> NetlistGraph::fanin_edges(GateId sink) const
{
    return std::span<const Edge>(edges_).subspan(fanin_offsets_[sink], fanin_offsets_[sink + 1] - fanin_offsets_[sink]);
}

std::span<const GateId> NetlistGraph::fanout(GateId driver) const
{
    return std::span<const GateId>(fanout_).subspan(fanout_offsets_[driver],
                                                    fanout_offsets_[driver + 1] - fanout_offsets_[driver]);
}

std::span<const GateId> NetlistGraph::neighbors(GateId id) const
{
    return std::span<const GateId>(neighbors_).subspan(neighbor_offsets_[id],
                                                       neighbor_offsets_[id + 1] - neighbor_offsets_[id]);
}

std::optional<GateId> NetlistGraph::find(std::string_view name) const
{
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end())
        return std::nullopt;
    return it->second;
}

NetlistGraph load_bench(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return parse_bench(buf.str());
    } catch (const ParseError &e) {
        throw ParseError(0, path.string() + ": " + e.what());
    }
}

std::string write_bench(const NetlistGraph &graph)
{
    std::string out;
    for (const Gate &gate : graph.gates()) {
        auto fanin = graph.fanin_edges(gate.id);
        switch (gate.kind) {
        case GateKind::Input:
            out += "INPUT(" + gate.name + ")\n";
            break;
        case GateKind::Output:
            out += "OUTPUT(" + graph.gate(fanin[0].driver).name + ")\n";
            break;
        default:
            out += gate.name + " = " + std::string(kind_name(gate.kind)) + "(";
            for (std::size_t i = 0; i < fanin.size(); ++i) {
                if (i)
                    out += ", ";
                out += graph.gate(fanin[i].driver).name;
            }
            out += ")\n";
        }
    }
    return out;
}

std::vector<GatePair> connected_pairs(const NetlistGraph &graph)
{
    std::vector<GatePair> pairs;
    for (GateId u = 0; u < graph.size(); ++u)
        for (GateId v : graph.neighbors(u))
            if (u < v)
                pairs.push_back({u, v});
    return pairs;
}

NetlistStats stats(const NetlistGraph &graph)
{
    NetlistStats s;
    s.input_count = graph.primary_inputs().size();
    s.output_count = graph.primary_outputs().size();
    s.gate_count = graph.size() - s.input_count - s.output_count;
    return s;
}

} // namespace splitsec
