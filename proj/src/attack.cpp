#include "splitsec/attack.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "recovery_graph.hpp"
#include "splitsec/error.hpp"

namespace splitsec {

namespace detail {

std::vector<GateId> drivers_by_name(const FeolView &view)
{
    std::vector<GateId> drivers = view.open_drivers;
    std::sort(drivers.begin(), drivers.end(),
              [&](GateId a, GateId b) { return view.cells[a].name < view.cells[b].name; });
    return drivers;
}

std::vector<PinRef> sinks_by_name(const FeolView &view)
{
    std::vector<PinRef> sinks = view.open_sinks;
    std::sort(sinks.begin(), sinks.end(), [&](const PinRef &a, const PinRef &b) {
        return std::tie(view.cells[a.cell].name, a.pin) < std::tie(view.cells[b.cell].name, b.pin);
    });
    return sinks;
}

void finish(AttackResult &result, const FeolView &view)
{
    std::sort(result.recovered.begin(), result.recovered.end(),
              [](const RecoveredEdge &a, const RecoveredEdge &b) { return a.sink < b.sink; });
    std::sort(result.unresolved.begin(), result.unresolved.end());
    result.wire_cost = 0;
    for (const RecoveredEdge &e : result.recovered)
        result.wire_cost += manhattan(view.cells[e.driver].site, view.cells[e.sink.cell].site);
}

} // namespace detail

FeolView feol_view(const NetlistGraph &graph, const Placement &placement)
{
    if (placement.sites.size() != graph.size())
        throw Error("placement does not match the netlist");
    FeolView view;
    view.cells.reserve(graph.size());
    for (const Gate &g : graph.gates()) {
        if (!placement.sites[g.id].placed())
            throw Error("gate '" + g.name + "' is not placed");
        view.cells.push_back({g.id, g.name, g.kind, g.fanin, placement.sites[g.id]});
        for (std::uint32_t pin = 0; pin < g.fanin; ++pin)
            view.open_sinks.push_back({g.id, pin});
        if (g.kind != GateKind::Output)
            view.open_drivers.push_back(g.id);
    }
    return view;
}

std::vector<RecoveredEdge> ground_truth(const NetlistGraph &graph)
{
    std::vector<RecoveredEdge> truth;
    truth.reserve(graph.edges().size());
    for (const Edge &e : graph.edges())
        truth.push_back({e.driver, {e.sink, e.pin}});
    return truth;
}

AttackResult greedy_proximity_attack(const FeolView &view)
{
    AttackResult result;
    result.attack = "greedy";
    const auto drivers = detail::drivers_by_name(view);
    detail::RecoveryGraph recovered(view.cells.size());

    std::optional<GateId> reach_of;
    for (const PinRef &sink : detail::sinks_by_name(view)) {
        // edges into this cell never change what it reaches, so one search
        // serves all of its pins
        if (reach_of != sink.cell) {
            recovered.reach(sink.cell);
            reach_of = sink.cell;
        }
        const Site at = view.cells[sink.cell].site;
        std::optional<GateId> best;
        int best_distance = 0;
        for (GateId d : drivers) {
            if (recovered.reached(d))
                continue;
            int dist = manhattan(view.cells[d].site, at);
            if (!best || dist < best_distance) {
                best = d;
                best_distance = dist;
            }
        }
        if (!best) {
            result.unresolved.push_back(sink);
            continue;
        }
        recovered.add(*best, sink.cell);
        result.recovered.push_back({*best, sink});
    }
    detail::finish(result, view);
    result.assignment_cost = result.wire_cost;
    return result;
}

Score score(const std::vector<RecoveredEdge> &truth, const std::vector<RecoveredEdge> &recovered)
{
    std::map<PinRef, GateId> expected;
    for (const RecoveredEdge &e : truth)
        expected.emplace(e.sink, e.driver);
    Score s;
    s.total = truth.size();
    for (const RecoveredEdge &e : recovered) {
        auto it = expected.find(e.sink);
        if (it != expected.end() && it->second == e.driver)
            ++s.correct;
    }
    s.rate = s.total ? static_cast<double>(s.correct) / static_cast<double>(s.total) : 0.0;
    return s;
}

void apply_score(AttackResult &result, const std::vector<RecoveredEdge> &truth)
{
    Score s = score(truth, result.recovered);
    result.correct = s.correct;
    result.total = s.total;
    result.rate = s.rate;
}

bool recovery_is_well_formed(const FeolView &view, const AttackResult &result)
{
    const std::size_t n = view.cells.size();
    std::map<PinRef, int> seen;
    for (const PinRef &p : view.open_sinks)
        seen.emplace(p, 0);
    std::vector<std::vector<GateId>> out(n);
    std::vector<std::uint32_t> indegree(n, 0);
    for (const RecoveredEdge &e : result.recovered) {
        if (e.driver >= n || e.sink.cell >= n || view.cells[e.driver].kind == GateKind::Output)
            return false;
        auto it = seen.find(e.sink);
        if (it == seen.end() || ++it->second > 1)
            return false;
        out[e.driver].push_back(e.sink.cell);
        ++indegree[e.sink.cell];
    }
    for (const PinRef &p : result.unresolved) {
        auto it = seen.find(p);
        if (it == seen.end() || ++it->second > 1)
            return false;
    }
    for (const auto &[pin, count] : seen)
        if (count != 1)
            return false;

    std::vector<GateId> stack;
    for (GateId g = 0; g < n; ++g)
        if (indegree[g] == 0)
            stack.push_back(g);
    std::size_t visited = 0;
    while (!stack.empty()) {
        GateId u = stack.back();
        stack.pop_back();
        ++visited;
        for (GateId v : out[u])
            if (--indegree[v] == 0)
                stack.push_back(v);
    }
    return visited == n;
}

std::string recovered_bench(const FeolView &view, const AttackResult &result)
{
    std::map<PinRef, std::string> source;
    for (const RecoveredEdge &e : result.recovered)
        source[e.sink] = view.cells[e.driver].name;
    std::string header, body;
    std::size_t unresolved = 0;
    auto driver_of = [&](PinRef pin) {
        auto it = source.find(pin);
        if (it != source.end())
            return it->second;
        std::string name = "UNRESOLVED_" + std::to_string(unresolved++);
        header += "INPUT(" + name + ")\n";
        return name;
    };
    for (const FeolCell &c : view.cells) {
        switch (c.kind) {
        case GateKind::Input:
            header += "INPUT(" + c.name + ")\n";
            break;
        case GateKind::Output:
            body += "OUTPUT(" + driver_of({c.id, 0}) + ")\n";
            break;
        default: {
            std::string line = c.name + " = " + std::string(kind_name(c.kind)) + "(";
            for (std::uint32_t pin = 0; pin < c.fanin; ++pin)
                line += (pin ? ", " : "") + driver_of({c.id, pin});
            body += line + ")\n";
        }
        }
    }
    return header + body;
}

} // namespace splitsec
