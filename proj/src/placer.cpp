#include <algorithm>
#include <cmath>

#include "splitsec/error.hpp"
#include "splitsec/layout.hpp"
#include "splitsec/rng.hpp"

namespace splitsec {

namespace {

constexpr int kEmpty = -1;
constexpr double kFinalTemperature = 0.05;

class Annealer {
  public:
    Annealer(const NetlistGraph &graph, const FencePlan &plan, std::uint64_t seed)
            : graph_(graph), plan_(plan), rng_(seed)
    {
        build_nets();
        initial_placement();
    }

    void anneal(std::size_t effort)
    {
        if (effort == 0 || movable_.empty())
            return;

        best_ = pos_;
        long best_cost = cost_;

        double t = initial_temperature();
        if (t <= kFinalTemperature)
            t = 1.0;
        const double alpha = std::pow(kFinalTemperature / t, 1.0 / static_cast<double>(effort));
        int max_span = 1;
        for (const auto &f : plan_.fences)
            if (f)
                max_span = std::max({max_span, f->width(), f->height()});
        double window = max_span;

        for (std::size_t step = 0; step < effort; ++step) {
            std::size_t accepted = 0;
            for (std::size_t m = 0; m < movable_.size(); ++m) {
                GateId c = movable_[rng_.below(movable_.size())];
                Site target = pick_target(c, static_cast<int>(std::lround(window)));
                if (target == pos_[c])
                    continue;
                long delta = try_move(c, target);
                if (delta <= 0 || rng_.uniform() < std::exp(-static_cast<double>(delta) / t)) {
                    commit();
                    ++accepted;
                } else {
                    revert();
                }
            }
            // keep the acceptance rate near 0.44 by resizing the move window
            double rate = static_cast<double>(accepted) / static_cast<double>(movable_.size());
            window = std::clamp(window * (1.0 - 0.44 + rate), 1.0, static_cast<double>(max_span));
            t *= alpha;
            if (cost_ < best_cost) {
                best_cost = cost_;
                best_ = pos_;
            }
        }
        if (best_cost < cost_) {
            pos_ = best_;
            cost_ = best_cost;
        }
    }

    std::vector<Site> sites() const { return pos_; }

  private:
    void build_nets()
    {
        const std::size_t n = graph_.size();
        std::vector<std::vector<std::uint32_t>> gate_nets(n);
        net_offsets_.push_back(0);
        for (GateId d = 0; d < n; ++d) {
            auto sinks = graph_.fanout(d);
            if (sinks.empty())
                continue;
            auto net = static_cast<std::uint32_t>(net_offsets_.size() - 1);
            net_pins_.push_back(d);
            gate_nets[d].push_back(net);
            for (GateId s : sinks) {
                net_pins_.push_back(s);
                gate_nets[s].push_back(net);
            }
            net_offsets_.push_back(static_cast<std::uint32_t>(net_pins_.size()));
        }
        gate_net_offsets_.push_back(0);
        for (auto &l : gate_nets) {
            std::sort(l.begin(), l.end());
            l.erase(std::unique(l.begin(), l.end()), l.end());
            gate_nets_.insert(gate_nets_.end(), l.begin(), l.end());
            gate_net_offsets_.push_back(static_cast<std::uint32_t>(gate_nets_.size()));
        }
        net_cost_.assign(net_offsets_.size() - 1, 0);
        net_stamp_.assign(net_cost_.size(), 0);
    }

    void initial_placement()
    {
        const std::size_t n = graph_.size();
        if (plan_.assignment.size() != n)
            throw Error("fence plan does not match the netlist");
        pos_.assign(n, Site{});
        occupant_.assign(static_cast<std::size_t>(plan_.die_area()), kEmpty);

        for (const PadSite &pad : plan_.io_ring)
            put(pad.gate, pad.site);

        std::vector<std::vector<GateId>> members(plan_.fences.size());
        for (const Gate &g : graph_.gates()) {
            if (is_pad_kind(g.kind)) {
                if (!pos_[g.id].placed())
                    throw Error("pad '" + g.name + "' has no I/O ring site");
                continue;
            }
            std::uint32_t p = plan_.assignment[g.id];
            if (p >= plan_.fences.size() || !plan_.fences[p])
                throw Error("cell '" + g.name + "' has no fence");
            members[p].push_back(g.id);
            movable_.push_back(g.id);
        }
        for (std::size_t p = 0; p < members.size(); ++p) {
            if (members[p].empty())
                continue;
            const Rect &r = *plan_.fences[p];
            if (r.area() < static_cast<long>(members[p].size()))
                throw Error("capacity violation: partition " + std::to_string(p) + " has " +
                            std::to_string(members[p].size()) + " cells but its fence holds " +
                            std::to_string(r.area()));
            std::vector<Site> free_sites;
            for (int y = r.y0; y < r.y1; ++y)
                for (int x = r.x0; x < r.x1; ++x)
                    free_sites.push_back({x, y});
            rng_.shuffle(std::span<Site>(free_sites));
            for (std::size_t i = 0; i < members[p].size(); ++i)
                put(members[p][i], free_sites[i]);
        }

        cost_ = 0;
        for (std::uint32_t net = 0; net < net_cost_.size(); ++net) {
            net_cost_[net] = net_hpwl(net);
            cost_ += net_cost_[net];
        }
    }

    std::size_t index(Site s) const { return static_cast<std::size_t>(s.y) * plan_.die_width + s.x; }

    void put(GateId g, Site s)
    {
        if (s.x < 0 || s.y < 0 || s.x >= plan_.die_width || s.y >= plan_.die_height)
            throw Error("site outside the die for '" + graph_.gate(g).name + "'");
        if (occupant_[index(s)] != kEmpty)
            throw Error("two gates assigned to site (" + std::to_string(s.x) + "," + std::to_string(s.y) + ")");
        occupant_[index(s)] = static_cast<int>(g);
        pos_[g] = s;
    }

    long net_hpwl(std::uint32_t net) const
    {
        int x0 = INT_MAX, x1 = INT_MIN, y0 = INT_MAX, y1 = INT_MIN;
        for (std::uint32_t k = net_offsets_[net]; k < net_offsets_[net + 1]; ++k) {
            Site s = pos_[net_pins_[k]];
            x0 = std::min(x0, s.x);
            x1 = std::max(x1, s.x);
            y0 = std::min(y0, s.y);
            y1 = std::max(y1, s.y);
        }
        return long(x1 - x0) + (y1 - y0);
    }

    Site pick_target(GateId c, int window)
    {
        const Rect &r = *plan_.fences[plan_.assignment[c]];
        Site at = pos_[c];
        int lx = std::max(r.x0, at.x - window), hx = std::min(r.x1 - 1, at.x + window);
        int ly = std::max(r.y0, at.y - window), hy = std::min(r.y1 - 1, at.y + window);
        return {lx + static_cast<int>(rng_.below(hx - lx + 1)), ly + static_cast<int>(rng_.below(hy - ly + 1))};
    }

    void collect_nets(GateId g)
    {
        for (std::uint32_t k = gate_net_offsets_[g]; k < gate_net_offsets_[g + 1]; ++k) {
            std::uint32_t net = gate_nets_[k];
            if (net_stamp_[net] != stamp_) {
                net_stamp_[net] = stamp_;
                touched_.push_back(net);
            }
        }
    }

    // Applies a move (or swap with the occupant) to positions only and
    // returns the cost change; commit() or revert() must follow.
    long try_move(GateId c, Site target)
    {
        ++stamp_;
        touched_.clear();
        moved_cell_ = c;
        moved_from_ = pos_[c];
        moved_to_ = target;
        other_ = occupant_[index(target)];
        collect_nets(c);
        if (other_ != kEmpty)
            collect_nets(static_cast<GateId>(other_));

        pos_[c] = target;
        if (other_ != kEmpty)
            pos_[other_] = moved_from_;
        long delta = 0;
        new_cost_.clear();
        for (std::uint32_t net : touched_) {
            long v = net_hpwl(net);
            new_cost_.push_back(v);
            delta += v - net_cost_[net];
        }
        pending_delta_ = delta;
        return delta;
    }

    void commit()
    {
        occupant_[index(moved_from_)] = other_;
        occupant_[index(moved_to_)] = static_cast<int>(moved_cell_);
        for (std::size_t i = 0; i < touched_.size(); ++i)
            net_cost_[touched_[i]] = new_cost_[i];
        cost_ += pending_delta_;
    }

    void revert()
    {
        pos_[moved_cell_] = moved_from_;
        if (other_ != kEmpty)
            pos_[other_] = moved_to_;
    }

    double initial_temperature()
    {
        double sum = 0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < movable_.size(); ++i) {
            GateId c = movable_[rng_.below(movable_.size())];
            const Rect &r = *plan_.fences[plan_.assignment[c]];
            Site target = pick_target(c, std::max(r.width(), r.height()));
            if (target == pos_[c])
                continue;
            long delta = try_move(c, target);
            revert();
            if (delta != 0) {
                sum += std::abs(static_cast<double>(delta));
                ++count;
            }
        }
        return count ? 1.5 * sum / static_cast<double>(count) : 0.0;
    }

    const NetlistGraph &graph_;
    const FencePlan &plan_;
    Rng rng_;

    std::vector<Site> pos_, best_;
    std::vector<int> occupant_;
    std::vector<GateId> movable_;
    long cost_ = 0;

    std::vector<std::uint32_t> net_offsets_, net_pins_;
    std::vector<std::uint32_t> gate_net_offsets_, gate_nets_;
    std::vector<long> net_cost_;
    std::vector<std::uint64_t> net_stamp_;
    std::uint64_t stamp_ = 0;

    std::vector<std::uint32_t> touched_;
    std::vector<long> new_cost_;
    GateId moved_cell_ = 0;
    Site moved_from_, moved_to_;
    int other_ = kEmpty;
    long pending_delta_ = 0;
};

} // namespace

Placement place(const NetlistGraph &graph, const FencePlan &plan, std::uint64_t seed, std::size_t effort)
{
    Annealer annealer(graph, plan, seed);
    annealer.anneal(effort);
    Placement pl;
    pl.sites = annealer.sites();
    pl.fence_plan = plan;
    pl.seed = seed;
    pl.utilization = plan.utilization;
    return pl;
}

} // namespace splitsec
