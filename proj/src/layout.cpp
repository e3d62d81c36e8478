#include <algorithm>
#include <cmath>

#include "splitsec/error.hpp"
#include "splitsec/layout.hpp"
#include "splitsec/rng.hpp"

namespace splitsec {

Placement shuffle(const NetlistGraph &graph, const Placement &placement, double fraction, std::uint64_t seed)
{
    if (!(fraction >= 0.0 && fraction <= 1.0))
        throw ConfigError("shuffle fraction must be in [0, 1]");
    if (placement.sites.size() != graph.size())
        throw Error("placement does not match the netlist");

    std::vector<GateId> cells;
    for (const Gate &g : graph.gates())
        if (!is_pad_kind(g.kind))
            cells.push_back(g.id);
    const auto pick = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(cells.size()) - 1e-9));

    Placement out = placement;
    if (pick == 0)
        return out;

    // partial Fisher-Yates: the first `pick` entries become a uniform sample
    Rng rng(seed);
    for (std::size_t i = 0; i < pick; ++i) {
        std::size_t j = i + rng.below(cells.size() - i);
        std::swap(cells[i], cells[j]);
    }
    std::vector<GateId> chosen(cells.begin(), cells.begin() + static_cast<std::ptrdiff_t>(pick));
    std::sort(chosen.begin(), chosen.end());
    std::vector<Site> sites;
    for (GateId g : chosen)
        sites.push_back(placement.sites[g]);
    rng.shuffle(std::span<Site>(sites));
    for (std::size_t i = 0; i < chosen.size(); ++i)
        out.sites[chosen[i]] = sites[i];
    return out;
}

WirelengthReport hpwl(const NetlistGraph &graph, const Placement &placement)
{
    if (placement.sites.size() != graph.size())
        throw Error("placement does not match the netlist");
    WirelengthReport report;
    report.die_area = placement.fence_plan.die_area();
    for (GateId d = 0; d < graph.size(); ++d) {
        auto sinks = graph.fanout(d);
        if (sinks.empty())
            continue;
        Site s = placement.sites[d];
        if (!s.placed())
            throw Error("gate '" + graph.gate(d).name + "' is not placed");
        int x0 = s.x, x1 = s.x, y0 = s.y, y1 = s.y;
        for (GateId k : sinks) {
            Site t = placement.sites[k];
            if (!t.placed())
                throw Error("gate '" + graph.gate(k).name + "' is not placed");
            x0 = std::min(x0, t.x);
            x1 = std::max(x1, t.x);
            y0 = std::min(y0, t.y);
            y1 = std::max(y1, t.y);
        }
        long len = long(x1 - x0) + (y1 - y0);
        report.per_net_hpwl.emplace_back(d, len);
        report.total_hpwl += len;
    }
    return report;
}

int manhattan(const Placement &placement, GateId u, GateId v)
{
    if (u >= placement.sites.size() || v >= placement.sites.size() || !placement.sites[u].placed() ||
        !placement.sites[v].placed())
        throw Error("manhattan distance of an unplaced gate");
    return manhattan(placement.sites[u], placement.sites[v]);
}

void validate_placement(const NetlistGraph &graph, const Placement &placement, bool check_fences)
{
    const FencePlan &plan = placement.fence_plan;
    if (placement.sites.size() != graph.size())
        throw InvariantError("placement does not cover the netlist");
    std::vector<Site> used;
    used.reserve(graph.size());
    for (const Gate &g : graph.gates()) {
        Site s = placement.sites[g.id];
        if (!s.placed())
            throw InvariantError("gate '" + g.name + "' is not placed");
        if (s.x < 0 || s.y < 0 || s.x >= plan.die_width || s.y >= plan.die_height)
            throw InvariantError("gate '" + g.name + "' is outside the die");
        used.push_back(s);
        if (!check_fences || is_pad_kind(g.kind))
            continue;
        const auto &fence = plan.fences.at(plan.assignment.at(g.id));
        if (!fence || !fence->contains(s))
            throw InvariantError("gate '" + g.name + "' is outside its fence");
    }
    for (const PadSite &pad : plan.io_ring)
        if (placement.sites[pad.gate] != pad.site)
            throw InvariantError("pad '" + graph.gate(pad.gate).name + "' left its ring site");
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
        throw InvariantError("two gates share a site");
}

} // namespace splitsec
