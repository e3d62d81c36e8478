#pragma once

#include <algorithm>
#include <vector>

#include "splitsec/attack.hpp"

namespace splitsec::detail {

// Recovered driver -> sink-cell edges with multiplicity, for reachability
// queries while an attack is assembling its netlist.
class RecoveryGraph {
  public:
    explicit RecoveryGraph(std::size_t cells) : out_(cells), mark_(cells, 0) {}

    void add(GateId driver, GateId sink) { out_[driver].push_back(sink); }

    void remove(GateId driver, GateId sink)
    {
        auto &l = out_[driver];
        l.erase(std::find(l.begin(), l.end(), sink));
    }

    // Marks every cell reachable from `from` (including it); query with reached().
    void reach(GateId from)
    {
        ++stamp_;
        stack_.assign(1, from);
        mark_[from] = stamp_;
        while (!stack_.empty()) {
            GateId u = stack_.back();
            stack_.pop_back();
            for (GateId v : out_[u])
                if (mark_[v] != stamp_) {
                    mark_[v] = stamp_;
                    stack_.push_back(v);
                }
        }
    }

    bool reached(GateId g) const { return mark_[g] == stamp_; }

    const std::vector<GateId> &successors(GateId g) const { return out_[g]; }
    std::size_t size() const { return out_.size(); }

  private:
    std::vector<std::vector<GateId>> out_;
    std::vector<std::uint64_t> mark_;
    std::uint64_t stamp_ = 0;
    std::vector<GateId> stack_;
};

// Drivers sorted by name so a strict-less scan breaks distance ties by name.
std::vector<GateId> drivers_by_name(const FeolView &view);

// Sinks in (cell name, pin) order.
std::vector<PinRef> sinks_by_name(const FeolView &view);

// Sorts edges and pins and sums the recovered wire cost.
void finish(AttackResult &result, const FeolView &view);

} // namespace splitsec::detail
