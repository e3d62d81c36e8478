#include "fixtures.hpp"

#include <algorithm>

#include "splitsec/rng.hpp"

namespace fixtures {

using namespace splitsec;

std::filesystem::path data_dir() { return SPLITSEC_TEST_DATA; }

NetlistGraph full_adder() { return load_bench(data_dir() / "full_adder.bench"); }

std::string random_bench(const DagShape &shape, std::uint64_t seed)
{
    static const char *kinds[] = {"AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUFF"};
    Rng rng(seed);
    std::vector<std::string> signals;
    std::string text;
    for (std::size_t i = 0; i < shape.inputs; ++i) {
        signals.push_back("I" + std::to_string(i));
        text += "INPUT(" + signals.back() + ")\n";
    }
    std::vector<bool> used(shape.inputs + shape.gates, false);
    std::string body;
    for (std::size_t g = 0; g < shape.gates; ++g) {
        std::string kind = kinds[rng.below(8)];
        std::size_t fanin = (kind == "NOT" || kind == "BUFF") ? 1 : 2 + rng.below(3);
        fanin = std::min(fanin, signals.size());
        if (fanin < 2 && kind != "NOT" && kind != "BUFF")
            kind = "BUFF";
        std::vector<std::size_t> picks;
        while (picks.size() < fanin) {
            std::size_t s = rng.below(signals.size());
            if (std::find(picks.begin(), picks.end(), s) == picks.end())
                picks.push_back(s);
        }
        std::string name = "G" + std::to_string(g);
        body += name + " = " + kind + "(";
        for (std::size_t k = 0; k < picks.size(); ++k) {
            body += (k ? ", " : "") + signals[picks[k]];
            used[picks[k]] = true;
        }
        body += ")\n";
        signals.push_back(name);
    }
    std::vector<std::string> outs;
    for (std::size_t s = signals.size(); s-- > shape.inputs && outs.size() < shape.outputs;)
        if (!used[s])
            outs.push_back(signals[s]);
    while (outs.size() < shape.outputs && outs.size() < shape.gates) {
        std::string s = signals[shape.inputs + rng.below(shape.gates)];
        if (std::find(outs.begin(), outs.end(), s) == outs.end())
            outs.push_back(s);
    }
    for (const auto &o : outs)
        text += "OUTPUT(" + o + ")\n";
    return text + body;
}

NetlistGraph random_dag(const DagShape &shape, std::uint64_t seed) { return parse_bench(random_bench(shape, seed)); }

Placement at_sites(const NetlistGraph &graph, std::vector<Site> sites)
{
    Placement pl;
    int w = 1, h = 1;
    for (const Site &s : sites) {
        w = std::max(w, s.x + 1);
        h = std::max(h, s.y + 1);
    }
    pl.sites = std::move(sites);
    pl.fence_plan.die_width = w;
    pl.fence_plan.die_height = h;
    pl.fence_plan.assignment.assign(graph.size(), 0);
    pl.fence_plan.fences.assign(1, std::nullopt);
    return pl;
}

Placement random_layout(const NetlistGraph &graph, int width, int height, std::uint64_t seed)
{
    std::vector<Site> grid;
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x)
            grid.push_back({x, y});
    Rng rng(seed);
    rng.shuffle(std::span<Site>(grid));
    grid.resize(graph.size());
    return at_sites(graph, std::move(grid));
}

} // namespace fixtures
