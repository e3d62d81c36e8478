#include "splitsec/serialize.hpp"

#include <algorithm>
#include <charconv>

#include "splitsec/error.hpp"

namespace splitsec {

namespace {

GateId lookup(const NetlistGraph &graph, const std::string &name)
{
    auto id = graph.find(name);
    if (!id)
        throw Error("unknown gate '" + name + "'");
    return *id;
}

Json fences_json(const FencePlan &plan)
{
    Json fences = Json::array();
    for (std::size_t p = 0; p < plan.fences.size(); ++p) {
        if (!plan.fences[p])
            continue;
        const Rect &r = *plan.fences[p];
        fences.push_back({{"partition", p}, {"x0", r.x0}, {"y0", r.y0}, {"x1", r.x1}, {"y1", r.y1}});
    }
    return fences;
}

Json pads_json(const FencePlan &plan, const NetlistGraph &graph)
{
    Json pads = Json::array();
    for (const PadSite &pad : plan.io_ring)
        pads.push_back({{"name", graph.gate(pad.gate).name}, {"x", pad.site.x}, {"y", pad.site.y}});
    return pads;
}

void read_fences(const Json &json, FencePlan &plan)
{
    for (const Json &f : json) {
        auto p = f.at("partition").get<std::size_t>();
        if (p >= plan.fences.size())
            plan.fences.resize(p + 1);
        plan.fences[p] = Rect{f.at("x0").get<int>(), f.at("y0").get<int>(), f.at("x1").get<int>(), f.at("y1").get<int>()};
    }
}

void read_pads(const Json &json, const NetlistGraph &graph, FencePlan &plan)
{
    for (const Json &p : json)
        plan.io_ring.push_back({lookup(graph, p.at("name").get<std::string>()), {p.at("x").get<int>(), p.at("y").get<int>()}});
    std::sort(plan.io_ring.begin(), plan.io_ring.end(),
              [](const PadSite &a, const PadSite &b) { return a.gate < b.gate; });
}

template <class F>
auto guarded(F &&body) -> decltype(body())
{
    try {
        return body();
    } catch (const Json::exception &e) {
        throw Error(std::string("malformed JSON: ") + e.what());
    }
}

} // namespace

Json to_json(const NetlistGraph &graph)
{
    Json gates = Json::array(), edges = Json::array(), inputs = Json::array(), outputs = Json::array();
    for (const Gate &g : graph.gates())
        gates.push_back({{"id", g.id}, {"name", g.name}, {"kind", kind_name(g.kind)}, {"fanin", g.fanin}});
    for (const Edge &e : graph.edges())
        edges.push_back({{"driver", graph.gate(e.driver).name}, {"sink", graph.gate(e.sink).name}, {"pin", e.pin}});
    for (GateId g : graph.primary_inputs())
        inputs.push_back(graph.gate(g).name);
    for (GateId g : graph.primary_outputs())
        outputs.push_back(graph.gate(g).name);
    const NetlistStats s = stats(graph);
    return {{"stats", {{"inputs", s.input_count}, {"outputs", s.output_count}, {"gates", s.gate_count}}},
            {"gates", gates},
            {"edges", edges},
            {"inputs", inputs},
            {"outputs", outputs}};
}

Json to_json(const Partitioning &partitioning, const NetlistGraph &graph)
{
    Json parts = Json::array();
    for (const Partition &p : partitioning.partitions) {
        std::vector<std::string> names;
        for (GateId g : p.members)
            names.push_back(graph.gate(g).name);
        std::sort(names.begin(), names.end());
        parts.push_back({{"id", p.id}, {"label", p.label}, {"members", names}});
    }
    return {{"technique", technique_name(partitioning.technique)}, {"seed", partitioning.seed}, {"partitions", parts}};
}

Partitioning partitioning_from_json(const Json &json, const NetlistGraph &graph)
{
    return guarded([&] {
        Partitioning p;
        auto technique = partition_technique_from_name(json.at("technique").get<std::string>());
        if (!technique)
            throw Error("unknown technique '" + json.at("technique").get<std::string>() + "'");
        p.technique = *technique;
        p.seed = json.value("seed", std::uint64_t{0});
        constexpr auto kUnset = UINT32_MAX;
        p.assignment.assign(graph.size(), kUnset);
        for (const Json &part : json.at("partitions")) {
            Partition out;
            out.id = static_cast<std::uint32_t>(p.partitions.size());
            if (part.at("id").get<std::uint32_t>() != out.id)
                throw Error("partition ids must be dense and ordered");
            out.label = part.value("label", std::string{});
            for (const Json &m : part.at("members")) {
                GateId g = lookup(graph, m.get<std::string>());
                if (p.assignment[g] != kUnset)
                    throw Error("gate '" + graph.gate(g).name + "' is in two partitions");
                p.assignment[g] = out.id;
                out.members.push_back(g);
            }
            std::sort(out.members.begin(), out.members.end());
            p.partitions.push_back(std::move(out));
        }
        for (GateId g = 0; g < graph.size(); ++g)
            if (p.assignment[g] == kUnset)
                throw Error("gate '" + graph.gate(g).name + "' is in no partition");
        return p;
    });
}

Json to_json(const FencePlan &plan, const NetlistGraph &graph)
{
    Json assignment = Json::array();
    for (const Gate &g : graph.gates())
        assignment.push_back({{"name", g.name}, {"partition", plan.assignment.at(g.id)}});
    return {{"die", {plan.die_width, plan.die_height}},
            {"utilization", plan.utilization},
            {"fences", fences_json(plan)},
            {"pads", pads_json(plan, graph)},
            {"assignment", assignment}};
}

FencePlan fence_plan_from_json(const Json &json, const NetlistGraph &graph)
{
    return guarded([&] {
        FencePlan plan;
        plan.die_width = json.at("die").at(0).get<int>();
        plan.die_height = json.at("die").at(1).get<int>();
        plan.utilization = json.at("utilization").get<double>();
        read_fences(json.at("fences"), plan);
        read_pads(json.at("pads"), graph, plan);
        plan.assignment.assign(graph.size(), 0);
        std::vector<bool> seen(graph.size(), false);
        for (const Json &a : json.at("assignment")) {
            GateId g = lookup(graph, a.at("name").get<std::string>());
            plan.assignment[g] = a.at("partition").get<std::uint32_t>();
            seen[g] = true;
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw Error("fence plan assignment does not cover every gate");
        std::uint32_t max_part = 0;
        for (auto p : plan.assignment)
            max_part = std::max(max_part, p);
        if (plan.fences.size() <= max_part)
            plan.fences.resize(max_part + 1);
        return plan;
    });
}

Json to_json(const Placement &placement, const NetlistGraph &graph)
{
    const FencePlan &plan = placement.fence_plan;
    Json cells = Json::array();
    for (const Gate &g : graph.gates()) {
        const Site s = placement.sites.at(g.id);
        cells.push_back({{"name", g.name}, {"x", s.x}, {"y", s.y}, {"partition", plan.assignment.at(g.id)}});
    }
    return {{"die", {plan.die_width, plan.die_height}},
            {"utilization", placement.utilization},
            {"seed", placement.seed},
            {"cells", cells},
            {"fences", fences_json(plan)},
            {"pads", pads_json(plan, graph)}};
}

Placement placement_from_json(const Json &json, const NetlistGraph &graph)
{
    return guarded([&] {
        Placement pl;
        FencePlan &plan = pl.fence_plan;
        plan.die_width = json.at("die").at(0).get<int>();
        plan.die_height = json.at("die").at(1).get<int>();
        pl.utilization = plan.utilization = json.value("utilization", 1.0);
        pl.seed = json.value("seed", std::uint64_t{0});
        pl.sites.assign(graph.size(), Site{});
        plan.assignment.assign(graph.size(), 0);
        std::vector<bool> seen(graph.size(), false);
        for (const Json &c : json.at("cells")) {
            GateId g = lookup(graph, c.at("name").get<std::string>());
            if (seen[g])
                throw Error("gate '" + graph.gate(g).name + "' placed twice");
            seen[g] = true;
            pl.sites[g] = {c.at("x").get<int>(), c.at("y").get<int>()};
            plan.assignment[g] = c.value("partition", std::uint32_t{0});
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end())
            throw Error("placement does not cover every gate");
        if (json.contains("fences"))
            read_fences(json.at("fences"), plan);
        if (json.contains("pads")) {
            read_pads(json.at("pads"), graph, plan);
        } else {
            for (const Gate &g : graph.gates())
                if (is_pad_kind(g.kind))
                    plan.io_ring.push_back({g.id, pl.sites[g.id]});
        }
        std::uint32_t max_part = 0;
        for (auto p : plan.assignment)
            max_part = std::max(max_part, p);
        if (plan.fences.size() <= max_part)
            plan.fences.resize(max_part + 1);
        return pl;
    });
}

Json to_json(const LeakageReport &report)
{
    return {{"h_x", report.h_x}, {"h_x_given_d", report.h_x_given_d}, {"mi", report.mi}, {"normalized_mi", report.normalized_mi}};
}

Json to_json(const AttackResult &result, const FeolView &view)
{
    Json edges = Json::array(), unresolved = Json::array();
    for (const RecoveredEdge &e : result.recovered)
        edges.push_back({{"driver", view.cells[e.driver].name}, {"sink", view.cells[e.sink.cell].name}, {"pin", e.sink.pin}});
    for (const PinRef &p : result.unresolved)
        unresolved.push_back({{"sink", view.cells[p.cell].name}, {"pin", p.pin}});
    return {{"attack", result.attack},
            {"correct", result.correct},
            {"total", result.total},
            {"rate", result.rate},
            {"wire_cost", result.wire_cost},
            {"assignment_cost", result.assignment_cost},
            {"edges", edges},
            {"unresolved", unresolved}};
}

std::string format_number(double value)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{})
        throw InvariantError("number formatting failed");
    return std::string(buf, end);
}

} // namespace splitsec
