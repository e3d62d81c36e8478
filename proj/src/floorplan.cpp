#include <algorithm>
#include <cmath>
#include <tuple>

#include "splitsec/error.hpp"
#include "splitsec/layout.hpp"

namespace splitsec {

namespace {

struct Box {
    std::uint32_t partition;
    int w, h;
    int x = 0, y = 0;
};

long fence_capacity(std::size_t cells, double utilization)
{
    return static_cast<long>(std::ceil(static_cast<double>(cells) / utilization - 1e-9));
}

// Shelf packing into a strip of the given width; returns the strip height.
int shelf_pack(std::vector<Box> &boxes, int width)
{
    int x = 0, y = 0, shelf = 0;
    for (Box &b : boxes) {
        if (x > 0 && x + b.w > width) {
            y += shelf;
            x = 0;
            shelf = 0;
        }
        b.x = x;
        b.y = y;
        x += b.w;
        shelf = std::max(shelf, b.h);
    }
    return y + shelf;
}

// Boundary sites in clockwise order starting at (0, 0).
std::vector<Site> ring_sites(int w, int h)
{
    std::vector<Site> ring;
    for (int x = 0; x < w; ++x)
        ring.push_back({x, 0});
    for (int y = 1; y < h; ++y)
        ring.push_back({w - 1, y});
    if (h > 1)
        for (int x = w - 2; x >= 0; --x)
            ring.push_back({x, h - 1});
    if (w > 1)
        for (int y = h - 2; y >= 1; --y)
            ring.push_back({0, y});
    return ring;
}

} // namespace

FencePlan floorplan(const Partitioning &partitioning, const NetlistGraph &graph, double utilization)
{
    if (!(utilization > 0.0 && utilization <= 1.0))
        throw ConfigError("utilization must be in (0, 1]");
    if (partitioning.assignment.size() != graph.size())
        throw Error("partitioning does not match the netlist");

    FencePlan plan;
    plan.utilization = utilization;
    plan.assignment = partitioning.assignment;
    plan.fences.assign(partitioning.partitions.size(), std::nullopt);

    std::vector<std::size_t> cells(partitioning.partitions.size(), 0);
    for (const Gate &g : graph.gates())
        if (!is_pad_kind(g.kind))
            ++cells.at(partitioning.assignment[g.id]);

    std::vector<Box> boxes;
    for (std::uint32_t p = 0; p < cells.size(); ++p) {
        if (cells[p] == 0)
            continue;
        long cap = fence_capacity(cells[p], utilization);
        int w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cap))));
        while (long(w) * w < cap)
            ++w;
        while (w > 1 && long(w - 1) * (w - 1) >= cap)
            --w;
        int h = static_cast<int>((cap + w - 1) / w);
        boxes.push_back({p, w, h});
    }
    std::sort(boxes.begin(), boxes.end(), [](const Box &a, const Box &b) {
        return std::make_tuple(-long(a.w) * a.h, -a.h, a.partition) < std::make_tuple(-long(b.w) * b.h, -b.h, b.partition);
    });

    int core_w = 1, core_h = 1;
    if (!boxes.empty()) {
        int min_w = 0, sum_w = 0;
        for (const Box &b : boxes) {
            min_w = std::max(min_w, b.w);
            sum_w += b.w;
        }
        // the most square strip wins, then the smallest area
        std::tuple<int, long, int> best{INT_MAX, 0, 0};
        for (int width = min_w; width <= sum_w; ++width) {
            int height = shelf_pack(boxes, width);
            std::tuple<int, long, int> key{std::max(width, height), long(width) * height, width};
            if (key < best)
                best = key;
        }
        core_w = std::get<2>(best);
        core_h = shelf_pack(boxes, core_w);
    }

    std::vector<GateId> pads;
    for (const Gate &g : graph.gates())
        if (is_pad_kind(g.kind))
            pads.push_back(g.id);
    std::sort(pads.begin(), pads.end(),
              [&](GateId a, GateId b) { return graph.gate(a).name < graph.gate(b).name; });

    int die_w = core_w + 2, die_h = core_h + 2;
    while (2L * (die_w + die_h) - 4 < static_cast<long>(pads.size())) {
        if (die_w <= die_h)
            ++die_w;
        else
            ++die_h;
    }
    plan.die_width = die_w;
    plan.die_height = die_h;

    const int off_x = 1 + (die_w - 2 - core_w) / 2;
    const int off_y = 1 + (die_h - 2 - core_h) / 2;
    for (const Box &b : boxes)
        plan.fences[b.partition] = Rect{off_x + b.x, off_y + b.y, off_x + b.x + b.w, off_y + b.y + b.h};

    auto ring = ring_sites(die_w, die_h);
    for (std::size_t i = 0; i < pads.size(); ++i)
        plan.io_ring.push_back({pads[i], ring[i * ring.size() / pads.size()]});
    std::sort(plan.io_ring.begin(), plan.io_ring.end(),
              [](const PadSite &a, const PadSite &b) { return a.gate < b.gate; });
    return plan;
}

void validate_fence_plan(const NetlistGraph &graph, const FencePlan &plan)
{
    if (plan.assignment.size() != graph.size())
        throw InvariantError("fence plan assignment does not cover the netlist");
    const Rect die{0, 0, plan.die_width, plan.die_height};
    std::vector<std::size_t> cells(plan.fences.size(), 0);
    for (const Gate &g : graph.gates())
        if (!is_pad_kind(g.kind))
            ++cells.at(plan.assignment[g.id]);
    for (std::size_t p = 0; p < plan.fences.size(); ++p) {
        const auto &f = plan.fences[p];
        if (!f) {
            if (cells[p] > 0)
                throw InvariantError("partition " + std::to_string(p) + " has cells but no fence");
            continue;
        }
        if (f->x0 < die.x0 + 1 || f->y0 < die.y0 + 1 || f->x1 > die.x1 - 1 || f->y1 > die.y1 - 1)
            throw InvariantError("fence " + std::to_string(p) + " leaves the core area");
        if (f->area() < fence_capacity(cells[p], plan.utilization))
            throw InvariantError("fence " + std::to_string(p) + " is below its capacity target");
        for (std::size_t q = p + 1; q < plan.fences.size(); ++q)
            if (plan.fences[q] && f->overlaps(*plan.fences[q]))
                throw InvariantError("fences " + std::to_string(p) + " and " + std::to_string(q) + " overlap");
    }
    std::vector<Site> used;
    for (const PadSite &pad : plan.io_ring) {
        const Site s = pad.site;
        bool on_ring = s.x == 0 || s.y == 0 || s.x == plan.die_width - 1 || s.y == plan.die_height - 1;
        if (!die.contains(s) || !on_ring)
            throw InvariantError("pad '" + graph.gate(pad.gate).name + "' is not on the I/O ring");
        used.push_back(s);
    }
    std::sort(used.begin(), used.end());
    if (std::adjacent_find(used.begin(), used.end()) != used.end())
        throw InvariantError("two pads share a ring site");
}

} // namespace splitsec
