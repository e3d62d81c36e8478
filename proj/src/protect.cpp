#include "splitsec/protect.hpp"

#include <map>

#include "splitsec/error.hpp"
#include "splitsec/rng.hpp"

namespace splitsec {

namespace {

constexpr std::uint32_t kUncolored = UINT32_MAX;

std::vector<Partition> group_members(const std::vector<std::uint32_t> &assignment, std::size_t count)
{
    std::vector<Partition> partitions(count);
    for (std::uint32_t p = 0; p < count; ++p)
        partitions[p].id = p;
    for (GateId g = 0; g < assignment.size(); ++g)
        partitions[assignment[g]].members.push_back(g);
    return partitions;
}

} // namespace

std::string_view technique_name(PartitionTechnique technique)
{
    switch (technique) {
    case PartitionTechnique::None:
        return "none";
    case PartitionTechnique::GColor:
        return "g_color";
    case PartitionTechnique::GType1:
        return "g_type1";
    case PartitionTechnique::GType2:
        return "g_type2";
    }
    return "?";
}

std::optional<PartitionTechnique> partition_technique_from_name(std::string_view name)
{
    for (auto t : {PartitionTechnique::None, PartitionTechnique::GColor, PartitionTechnique::GType1,
                   PartitionTechnique::GType2})
        if (technique_name(t) == name)
            return t;
    return std::nullopt;
}

Partitioning g_color(const NetlistGraph &graph, std::uint64_t seed, std::vector<ColorChoice> *trace)
{
    const std::size_t n = graph.size();
    Partitioning result;
    result.technique = PartitionTechnique::GColor;
    result.seed = seed;
    if (n == 0)
        return result;

    std::vector<std::uint32_t> color(n, kUncolored);
    std::vector<std::size_t> class_size;
    std::vector<std::uint64_t> blocked_at; // per colour: stamp of the last vertex that blocked it
    std::uint64_t stamp = 0;

    auto color_vertex = [&](GateId v) {
        ++stamp;
        auto block = [&](GateId w) {
            if (color[w] != kUncolored)
                blocked_at[color[w]] = stamp;
        };
        for (GateId w : graph.neighbors(v))
            block(w);
        // sinks sharing a driver with v must differ from v as well
        for (const Edge &e : graph.fanin_edges(v))
            for (GateId w : graph.fanout(e.driver))
                if (w != v)
                    block(w);

        ColorChoice choice;
        choice.gate = v;
        std::uint32_t best = kUncolored;
        for (std::uint32_t c = 0; c < class_size.size(); ++c) {
            if (blocked_at[c] == stamp)
                continue;
            if (trace) {
                choice.feasible.push_back(c);
                choice.feasible_sizes.push_back(class_size[c]);
            }
            if (best == kUncolored || class_size[c] < class_size[best])
                best = c;
        }
        if (best == kUncolored) {
            best = static_cast<std::uint32_t>(class_size.size());
            class_size.push_back(0);
            blocked_at.push_back(0);
            choice.fresh = true;
        }
        color[v] = best;
        ++class_size[best];
        if (trace) {
            choice.chosen = best;
            trace->push_back(std::move(choice));
        }
    };

    // Worklist: a random start vertex, then the lowest remaining id. Each
    // picked vertex is coloured together with its uncoloured neighbours.
    Rng rng(seed);
    GateId u = static_cast<GateId>(rng.below(n));
    GateId scan = 0;
    while (true) {
        color_vertex(u);
        for (GateId v : graph.neighbors(u))
            if (color[v] == kUncolored)
                color_vertex(v);
        while (scan < n && color[scan] != kUncolored)
            ++scan;
        if (scan == n)
            break;
        u = scan;
    }

    result.assignment = std::move(color);
    result.partitions = group_members(result.assignment, class_size.size());
    for (auto &p : result.partitions)
        p.label = "color" + std::to_string(p.id);
    return result;
}

std::string type_key(const Gate &gate, GTypeFlavor flavor)
{
    std::string key(kind_name(gate.kind));
    if (flavor == GTypeFlavor::KindAndFanin && !is_pad_kind(gate.kind))
        key += std::to_string(gate.fanin);
    return key;
}

Partitioning g_type(const NetlistGraph &graph, GTypeFlavor flavor, std::uint64_t seed)
{
    Partitioning result;
    result.technique = flavor == GTypeFlavor::KindOnly ? PartitionTechnique::GType1 : PartitionTechnique::GType2;
    result.seed = seed;

    // type partitions in label order, then INPUT and OUTPUT
    std::map<std::string, std::uint32_t> type_ids;
    bool has_buf_inv = false;
    for (const Gate &g : graph.gates()) {
        if (is_pad_kind(g.kind))
            continue;
        if (is_buf_or_inv(g.kind))
            has_buf_inv = true;
        else
            type_ids.emplace(type_key(g, flavor), 0);
    }
    if (has_buf_inv && type_ids.empty())
        throw Error("g-type: the netlist has only BUF/NOT gates, no type partition can take them");

    std::vector<std::string> labels;
    for (auto &[label, id] : type_ids) {
        id = static_cast<std::uint32_t>(labels.size());
        labels.push_back(label);
    }
    const auto type_count = static_cast<std::uint32_t>(labels.size());
    std::optional<std::uint32_t> input_id, output_id;
    if (!graph.primary_inputs().empty()) {
        input_id = static_cast<std::uint32_t>(labels.size());
        labels.push_back("INPUT");
    }
    if (!graph.primary_outputs().empty()) {
        output_id = static_cast<std::uint32_t>(labels.size());
        labels.push_back("OUTPUT");
    }

    Rng rng(seed);
    result.assignment.resize(graph.size());
    for (const Gate &g : graph.gates()) {
        std::uint32_t p;
        if (g.kind == GateKind::Input)
            p = *input_id;
        else if (g.kind == GateKind::Output)
            p = *output_id;
        else if (is_buf_or_inv(g.kind))
            p = static_cast<std::uint32_t>(rng.below(type_count));
        else
            p = type_ids.at(type_key(g, flavor));
        result.assignment[g.id] = p;
    }
    result.partitions = group_members(result.assignment, labels.size());
    for (auto &p : result.partitions)
        p.label = labels[p.id];
    return result;
}

Partitioning identity_partition(const NetlistGraph &graph)
{
    if (graph.empty())
        throw Error("empty netlist");
    Partitioning result;
    result.technique = PartitionTechnique::None;
    result.assignment.assign(graph.size(), 0);
    result.partitions = group_members(result.assignment, 1);
    result.partitions[0].label = "all";
    return result;
}

void validate_partitioning(const NetlistGraph &graph, const Partitioning &partitioning)
{
    if (partitioning.assignment.size() != graph.size())
        throw InvariantError("partitioning does not cover every gate");
    std::vector<std::size_t> seen(partitioning.partitions.size(), 0);
    for (std::size_t i = 0; i < partitioning.partitions.size(); ++i) {
        const Partition &p = partitioning.partitions[i];
        if (p.id != i)
            throw InvariantError("partition ids are not dense");
        if (p.members.empty())
            throw InvariantError("partition " + std::to_string(i) + " is empty");
        for (GateId g : p.members)
            if (g >= graph.size() || partitioning.assignment[g] != p.id)
                throw InvariantError("partition member list disagrees with the assignment");
        seen[i] = p.members.size();
    }
    std::size_t total = 0;
    for (auto s : seen)
        total += s;
    if (total != graph.size())
        throw InvariantError("a gate belongs to more than one partition");
}

} // namespace splitsec
