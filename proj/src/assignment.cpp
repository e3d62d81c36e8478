#include <algorithm>
#include <limits>
#include <queue>

#include "recovery_graph.hpp"
#include "splitsec/attack.hpp"
#include "splitsec/error.hpp"

namespace splitsec {

namespace {

constexpr long kInfinite = std::numeric_limits<long>::max() / 4;

// Successive shortest paths with Dijkstra on reduced costs. Unit supply per
// sink, so each augmentation moves one unit.
class MinCostFlow {
  public:
    explicit MinCostFlow(std::size_t nodes) : head_(nodes, -1) {}

    void add_edge(std::size_t from, std::size_t to, long capacity, long cost)
    {
        arcs_.push_back({to, head_[from], capacity, cost});
        head_[from] = static_cast<int>(arcs_.size() - 1);
        arcs_.push_back({from, head_[to], 0, -cost});
        head_[to] = static_cast<int>(arcs_.size() - 1);
    }

    // Returns (flow, cost).
    std::pair<long, long> run(std::size_t source, std::size_t target, long demand)
    {
        const std::size_t n = head_.size();
        std::vector<long> potential(n, 0), dist(n);
        std::vector<int> via(n);
        long flow = 0, cost = 0;
        while (flow < demand) {
            std::fill(dist.begin(), dist.end(), kInfinite);
            std::fill(via.begin(), via.end(), -1);
            using Item = std::pair<long, std::size_t>;
            std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
            dist[source] = 0;
            queue.push({0, source});
            while (!queue.empty()) {
                auto [d, u] = queue.top();
                queue.pop();
                if (d != dist[u])
                    continue;
                for (int a = head_[u]; a != -1; a = arcs_[a].next) {
                    const Arc &arc = arcs_[a];
                    if (arc.capacity == 0)
                        continue;
                    long nd = d + arc.cost + potential[u] - potential[arc.to];
                    if (nd < dist[arc.to]) {
                        dist[arc.to] = nd;
                        via[arc.to] = a;
                        queue.push({nd, arc.to});
                    }
                }
            }
            if (dist[target] == kInfinite)
                break;
            for (std::size_t v = 0; v < n; ++v)
                if (dist[v] < kInfinite)
                    potential[v] += dist[v];
            for (std::size_t v = target; v != source; v = arcs_[via[v] ^ 1].to) {
                --arcs_[via[v]].capacity;
                ++arcs_[via[v] ^ 1].capacity;
                cost += arcs_[via[v]].cost;
            }
            ++flow;
        }
        return {flow, cost};
    }

    // Head node of every saturated forward arc leaving `from`.
    std::vector<std::size_t> used_targets(std::size_t from) const
    {
        std::vector<std::size_t> out;
        for (int a = head_[from]; a != -1; a = arcs_[a].next)
            if ((a & 1) == 0 && arcs_[a].capacity == 0)
                out.push_back(arcs_[a].to);
        return out;
    }

  private:
    struct Arc {
        std::size_t to;
        int next;
        long capacity;
        long cost;
    };
    std::vector<int> head_;
    std::vector<Arc> arcs_;
};

class Assignment {
  public:
    Assignment(const FeolView &view, const AssignmentOptions &options)
            : view_(view), options_(options), drivers_(detail::drivers_by_name(view)),
              first_sink_(view.cells.size() + 1, 0), driver_of_(view.open_sinks.size()),
              load_(view.cells.size(), 0)
    {
        for (const PinRef &p : view.open_sinks)
            ++first_sink_[p.cell + 1];
        for (std::size_t c = 0; c < view.cells.size(); ++c)
            first_sink_[c + 1] += first_sink_[c];
    }

    long solve()
    {
        return options_.max_fanout == 0 ? solve_unbounded() : solve_capped();
    }

    void repair()
    {
        detail::RecoveryGraph graph(view_.cells.size());
        for (std::size_t s = 0; s < driver_of_.size(); ++s)
            if (driver_of_[s])
                graph.add(*driver_of_[s], view_.open_sinks[s].cell);

        while (true) {
            auto cycle = find_cycle(graph);
            if (cycle.empty())
                break;
            // reroute the loop edge whose cheapest loop-free alternative adds least
            long best_cost = kInfinite;
            std::size_t best_edge = 0;
            std::vector<std::optional<GateId>> best_choice;
            for (std::size_t i = 0; i < cycle.size(); ++i) {
                auto [from, to] = cycle[i];
                graph.reach(to);
                std::vector<std::optional<GateId>> choice;
                long added = 0;
                std::vector<std::size_t> extra_load;
                for (std::size_t s = first_sink_[to]; s < first_sink_[to + 1]; ++s) {
                    if (driver_of_[s] != from)
                        continue;
                    auto alt = cheapest(to, graph, from, extra_load);
                    choice.push_back(alt);
                    if (!alt) {
                        added = kInfinite;
                        break;
                    }
                    extra_load.push_back(*alt);
                    added += distance(*alt, to) - distance(from, to);
                }
                if (i == 0 || added < best_cost) {
                    best_cost = added;
                    best_edge = i;
                    best_choice = std::move(choice);
                }
            }
            auto [from, to] = cycle[best_edge];
            std::size_t k = 0;
            for (std::size_t s = first_sink_[to]; s < first_sink_[to + 1]; ++s) {
                if (driver_of_[s] != from)
                    continue;
                graph.remove(from, to);
                --load_[from];
                driver_of_[s] = k < best_choice.size() ? best_choice[k] : std::nullopt;
                ++k;
                if (driver_of_[s]) {
                    graph.add(*driver_of_[s], to);
                    ++load_[*driver_of_[s]];
                }
            }
        }
    }

    void emit(AttackResult &result) const
    {
        for (std::size_t s = 0; s < driver_of_.size(); ++s) {
            if (driver_of_[s])
                result.recovered.push_back({*driver_of_[s], view_.open_sinks[s]});
            else
                result.unresolved.push_back(view_.open_sinks[s]);
        }
    }

  private:
    long distance(GateId a, GateId b) const { return manhattan(view_.cells[a].site, view_.cells[b].site); }

    // Nearest non-self driver per sink, ties by name.
    long solve_unbounded()
    {
        long total = 0;
        for (std::size_t s = 0; s < driver_of_.size(); ++s) {
            const GateId cell = view_.open_sinks[s].cell;
            std::optional<GateId> best;
            for (GateId d : drivers_)
                if (d != cell && (!best || distance(d, cell) < distance(*best, cell)))
                    best = d;
            driver_of_[s] = best;
            if (best) {
                total += distance(*best, cell);
                ++load_[*best];
            }
        }
        return total;
    }

    long solve_capped()
    {
        const std::size_t sinks = driver_of_.size(), cells = view_.cells.size();
        const std::size_t source = 0, target = 1 + sinks + cells;
        MinCostFlow flow(target + 1);
        std::vector<GateId> ranked;
        for (std::size_t s = 0; s < sinks; ++s) {
            const GateId cell = view_.open_sinks[s].cell;
            flow.add_edge(source, 1 + s, 1, 0);
            ranked.clear();
            for (GateId d : drivers_)
                if (d != cell)
                    ranked.push_back(d);
            std::stable_sort(ranked.begin(), ranked.end(),
                             [&](GateId a, GateId b) { return distance(a, cell) < distance(b, cell); });
            for (std::size_t i = 0; i < ranked.size(); ++i)
                if (i < options_.candidates || view_.cells[ranked[i]].kind == GateKind::Input)
                    flow.add_edge(1 + s, 1 + sinks + ranked[i], 1, distance(ranked[i], cell));
        }
        for (GateId d : drivers_)
            flow.add_edge(1 + sinks + d, target, static_cast<long>(options_.max_fanout), 0);

        auto [moved, cost] = flow.run(source, target, static_cast<long>(sinks));
        if (moved < static_cast<long>(sinks))
            throw Error("infeasible assignment: fan-out cap " + std::to_string(options_.max_fanout) +
                        " cannot serve every sink");
        for (std::size_t s = 0; s < sinks; ++s) {
            auto used = flow.used_targets(1 + s);
            auto d = static_cast<GateId>(used.at(0) - 1 - sinks);
            driver_of_[s] = d;
            ++load_[d];
        }
        return cost;
    }

    bool has_room(GateId d, const std::vector<std::size_t> &extra) const
    {
        if (options_.max_fanout == 0)
            return true;
        std::size_t pending = static_cast<std::size_t>(std::count(extra.begin(), extra.end(), d));
        return load_[d] + pending < options_.max_fanout;
    }

    // Cheapest driver for a pin of `cell` that closes no loop; `graph` holds
    // the reach set of `cell`.
    std::optional<GateId> cheapest(GateId cell, const detail::RecoveryGraph &graph, GateId current,
                                   const std::vector<std::size_t> &extra) const
    {
        std::optional<GateId> best;
        for (GateId d : drivers_) {
            if (d == current || graph.reached(d) || !has_room(d, extra))
                continue;
            if (!best || distance(d, cell) < distance(*best, cell))
                best = d;
        }
        return best;
    }

    // Edges (from, to) of some directed cycle, or empty when acyclic.
    static std::vector<std::pair<GateId, GateId>> find_cycle(const detail::RecoveryGraph &graph)
    {
        const std::size_t n = graph.size();
        enum : std::uint8_t { White, Grey, Black };
        std::vector<std::uint8_t> state(n, White);
        std::vector<std::pair<GateId, std::size_t>> stack;
        for (GateId root = 0; root < n; ++root) {
            if (state[root] != White)
                continue;
            stack.assign(1, {root, 0});
            state[root] = Grey;
            while (!stack.empty()) {
                auto &[u, next] = stack.back();
                const auto &succ = graph.successors(u);
                if (next == succ.size()) {
                    state[u] = Black;
                    stack.pop_back();
                    continue;
                }
                GateId v = succ[next++];
                if (state[v] == White) {
                    state[v] = Grey;
                    stack.push_back({v, 0});
                } else if (state[v] == Grey) {
                    std::vector<std::pair<GateId, GateId>> cycle;
                    std::size_t i = stack.size() - 1;
                    while (stack[i].first != v)
                        --i;
                    for (; i + 1 < stack.size(); ++i)
                        cycle.push_back({stack[i].first, stack[i + 1].first});
                    cycle.push_back({stack.back().first, v});
                    return cycle;
                }
            }
        }
        return {};
    }

    const FeolView &view_;
    AssignmentOptions options_;
    std::vector<GateId> drivers_;
    std::vector<std::size_t> first_sink_;
    std::vector<std::optional<GateId>> driver_of_;
    std::vector<std::size_t> load_;
};

} // namespace

AttackResult assignment_attack(const FeolView &view, const AssignmentOptions &options)
{
    AttackResult result;
    result.attack = "assignment";
    Assignment assignment(view, options);
    result.assignment_cost = assignment.solve();
    assignment.repair();
    assignment.emit(result);
    detail::finish(result, view);
    return result;
}

} // namespace splitsec
