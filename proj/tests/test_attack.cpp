#include <doctest.h>

#include <algorithm>
#include <functional>
#include <limits>

#include "fixtures.hpp"
#include "splitsec/attack.hpp"
#include "splitsec/error.hpp"
#include "splitsec/protect.hpp"
#include "splitsec/rng.hpp"

using namespace splitsec;

namespace {

struct Exhaustive {
    long best_legal = std::numeric_limits<long>::max(); // acyclic, unbounded fan-out
    long best_capped = std::numeric_limits<long>::max(); // any cycles, fan-out <= cap
};

bool acyclic(std::size_t n, const std::vector<std::pair<GateId, GateId>> &edges)
{
    std::vector<std::vector<GateId>> out(n);
    std::vector<int> indegree(n, 0);
    for (auto [d, s] : edges) {
        out[d].push_back(s);
        ++indegree[s];
    }
    std::vector<GateId> ready;
    for (GateId i = 0; i < n; ++i)
        if (indegree[i] == 0)
            ready.push_back(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        GateId u = ready.back();
        ready.pop_back();
        ++seen;
        for (GateId v : out[u])
            if (--indegree[v] == 0)
                ready.push_back(v);
    }
    return seen == n;
}

// Enumerates every driver choice for every open sink.
Exhaustive enumerate(const FeolView &view, std::size_t cap)
{
    Exhaustive best;
    const std::size_t n = view.cells.size();
    std::vector<GateId> choice(view.open_sinks.size());
    std::function<void(std::size_t)> rec = [&](std::size_t i) {
        if (i == view.open_sinks.size()) {
            long cost = 0;
            std::vector<std::pair<GateId, GateId>> edges;
            std::vector<std::size_t> load(n, 0);
            for (std::size_t k = 0; k < choice.size(); ++k) {
                GateId sink = view.open_sinks[k].cell;
                cost += manhattan(view.cells[choice[k]].site, view.cells[sink].site);
                edges.push_back({choice[k], sink});
                ++load[choice[k]];
            }
            if (acyclic(n, edges))
                best.best_legal = std::min(best.best_legal, cost);
            if (*std::max_element(load.begin(), load.end()) <= cap)
                best.best_capped = std::min(best.best_capped, cost);
            return;
        }
        for (GateId d : view.open_drivers) {
            if (d == view.open_sinks[i].cell)
                continue;
            choice[i] = d;
            rec(i + 1);
        }
    };
    rec(0);
    return best;
}

AttackResult scored(AttackResult r, const NetlistGraph &g)
{
    apply_score(r, ground_truth(g));
    return r;
}

} // namespace

TEST_SUITE("attack")
{
    TEST_CASE("FEOL view pin inventory")
    {
        const NetlistGraph fa = fixtures::full_adder();
        const FeolView v = feol_view(fa, fixtures::random_layout(fa, 5, 5, 0));
        CHECK(v.cells.size() == 10);
        CHECK(v.open_sinks.size() == 12);
        CHECK(v.open_drivers.size() == 8);

        const NetlistGraph wire = parse_bench("INPUT(a)\nOUTPUT(a)\n");
        const FeolView w = feol_view(wire, fixtures::at_sites(wire, {{0, 0}, {1, 0}}));
        CHECK(w.open_sinks.size() == 1);
        CHECK(w.open_drivers.size() == 1);

        const NetlistGraph pis = parse_bench("INPUT(a)\nINPUT(b)\n");
        CHECK(feol_view(pis, fixtures::at_sites(pis, {{0, 0}, {1, 0}})).open_sinks.empty());
    }

    TEST_CASE("nearest driver wins")
    {
        const NetlistGraph g = parse_bench("INPUT(t)\nINPUT(d)\ns = NOT(t)\n");
        const AttackResult near = scored(greedy_proximity_attack(feol_view(g, fixtures::at_sites(g, {{1, 0}, {5, 0}, {0, 0}}))), g);
        CHECK(near.rate == 1.0);
        const AttackResult far = scored(greedy_proximity_attack(feol_view(g, fixtures::at_sites(g, {{5, 0}, {1, 0}, {0, 0}}))), g);
        CHECK(far.rate == 0.0);
        CHECK(far.total == 1);
    }

    TEST_CASE("distance ties go to the smaller name")
    {
        const NetlistGraph g = parse_bench("INPUT(zz)\nINPUT(aa)\ns = NOT(zz)\n");
        const FeolView v = feol_view(g, fixtures::at_sites(g, {{0, 0}, {2, 0}, {1, 0}}));
        const AttackResult r = greedy_proximity_attack(v);
        REQUIRE(r.recovered.size() == 1);
        CHECK(v.cells[r.recovered[0].driver].name == "aa");
    }

    TEST_CASE("single sink: assignment equals greedy")
    {
        const NetlistGraph g = parse_bench("INPUT(t)\nINPUT(d)\ns = NOT(t)\n");
        const FeolView v = feol_view(g, fixtures::at_sites(g, {{3, 0}, {5, 2}, {0, 0}}));
        CHECK(assignment_attack(v).recovered == greedy_proximity_attack(v).recovered);
    }

    TEST_CASE("greedy is beaten by the global assignment on a small construction")
    {
        // sink order PO(v), u, v: greedy gives u to v, which then forces v onto the distant p
        const NetlistGraph g = parse_bench("INPUT(p)\nOUTPUT(v)\nu = NOT(p)\nv = NOT(u)\n");
        const FeolView view = feol_view(g, fixtures::at_sites(g, {{0, 0}, {4, 1}, {3, 0}, {4, 0}}));
        const AttackResult greedy = greedy_proximity_attack(view);
        const AttackResult global = assignment_attack(view);
        const Exhaustive oracle = enumerate(view, view.open_sinks.size());
        CHECK(greedy.wire_cost == 6);
        CHECK(oracle.best_legal == 5);
        CHECK(global.wire_cost == oracle.best_legal);
        CHECK(global.wire_cost < greedy.wire_cost);
        CHECK(global.assignment_cost <= greedy.wire_cost);
        CHECK(recovery_is_well_formed(view, global));
        CHECK(scored(global, g).rate == 1.0);
    }

    TEST_CASE("random small views: cost ordering, legality and the exhaustive bounds")
    {
        Rng rng(99);
        for (int trial = 0; trial < 60; ++trial) {
            const NetlistGraph g = fixtures::random_dag({1 + rng.below(2), 2 + rng.below(2), 1}, rng.next());
            const FeolView view = feol_view(g, fixtures::random_layout(g, 4, 4, rng.next()));
            if (view.open_sinks.size() > 6)
                continue;
            const AttackResult greedy = greedy_proximity_attack(view);
            const AttackResult global = assignment_attack(view);
            const Exhaustive oracle = enumerate(view, 1);
            CHECK(recovery_is_well_formed(view, greedy));
            CHECK(recovery_is_well_formed(view, global));
            CHECK(global.assignment_cost <= greedy.wire_cost);
            CHECK(greedy.wire_cost >= oracle.best_legal);
            CHECK(global.wire_cost >= oracle.best_legal);

            if (oracle.best_capped != std::numeric_limits<long>::max()) {
                const AttackResult capped = assignment_attack(view, {1, 1000});
                CHECK(capped.assignment_cost == oracle.best_capped);
            } else {
                CHECK_THROWS_AS(assignment_attack(view, {1, 1000}), Error);
            }
        }
    }

    TEST_CASE("capped flow with room for every pin matches the unbounded assignment")
    {
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const NetlistGraph g = fixtures::random_dag({5, 40, 4}, seed);
            const FeolView view = feol_view(g, fixtures::random_layout(g, 10, 10, seed));
            const AttackResult unbounded = assignment_attack(view);
            const AttackResult capped = assignment_attack(view, {view.open_sinks.size(), 8});
            CHECK(capped.assignment_cost == unbounded.assignment_cost);
            CHECK(recovery_is_well_formed(view, capped));
        }
    }

    TEST_CASE("fan-out cap is respected after repair")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const NetlistGraph g = fixtures::random_dag({8, 40, 4}, seed);
            const FeolView view = feol_view(g, fixtures::random_layout(g, 10, 10, seed));
            const AttackResult r = assignment_attack(view, {3, 16});
            CHECK(recovery_is_well_formed(view, r));
            std::vector<std::size_t> load(view.cells.size(), 0);
            for (const RecoveredEdge &e : r.recovered)
                ++load[e.driver];
            CHECK(*std::max_element(load.begin(), load.end()) <= 3);
        }
    }

    TEST_CASE("both attacks recover clustered layouts exactly")
    {
        // stars of one driver and up to four inverter leaves around it; clusters far apart
        Rng rng(5);
        for (int trial = 0; trial < 20; ++trial) {
            std::string text;
            std::vector<Site> sites;
            const std::size_t stars = 1 + rng.below(6);
            const Site ring[4] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
            for (std::size_t s = 0; s < stars; ++s) {
                const int cx = 10 * static_cast<int>(s) + 2, cy = 2;
                text += "INPUT(h" + std::to_string(s) + ")\n";
                sites.push_back({cx, cy});
                const std::size_t leaves = 1 + rng.below(4);
                for (std::size_t l = 0; l < leaves; ++l) {
                    text += "l" + std::to_string(s) + "_" + std::to_string(l) + " = NOT(h" + std::to_string(s) + ")\n";
                    sites.push_back({cx + ring[l].x, cy + ring[l].y});
                }
            }
            const NetlistGraph g = parse_bench(text);
            const FeolView view = feol_view(g, fixtures::at_sites(g, sites));
            CHECK(scored(greedy_proximity_attack(view), g).rate == 1.0);
            CHECK(scored(assignment_attack(view), g).rate == 1.0);
        }

        // chain with doubling gaps: the predecessor is always strictly nearest
        const NetlistGraph chain = parse_bench("INPUT(a)\nOUTPUT(e)\nb = NOT(a)\nc = NOT(b)\nd = NOT(c)\ne = NOT(d)\n");
        const FeolView view = feol_view(chain, fixtures::at_sites(chain, {{0, 0}, {15, 1}, {1, 0}, {3, 0}, {7, 0}, {15, 0}}));
        CHECK(scored(greedy_proximity_attack(view), chain).rate == 1.0);
        CHECK(scored(assignment_attack(view), chain).rate == 1.0);
    }

    TEST_CASE("scoring")
    {
        const NetlistGraph g = fixtures::full_adder();
        const auto truth = ground_truth(g);
        CHECK(score(truth, truth).rate == 1.0);
        CHECK(score(truth, {}).rate == 0.0);
        CHECK(score(truth, {}).total == 12);
        std::vector<RecoveredEdge> half(truth.begin(), truth.begin() + 6);
        CHECK(score(truth, half).rate == 0.5);
        auto wrong = truth;
        for (auto &e : wrong)
            e.driver = e.sink.cell;
        CHECK(score(truth, wrong).correct == 0);
    }

    TEST_CASE("well-formedness checks")
    {
        const NetlistGraph g = fixtures::full_adder();
        const FeolView view = feol_view(g, fixtures::random_layout(g, 5, 5, 3));
        AttackResult r;
        r.recovered = ground_truth(g);
        CHECK(recovery_is_well_formed(view, r));
        AttackResult missing = r;
        missing.recovered.pop_back();
        CHECK(!recovery_is_well_formed(view, missing));
        missing.unresolved.push_back(r.recovered.back().sink);
        CHECK(recovery_is_well_formed(view, missing));
        AttackResult doubled = r;
        doubled.recovered.push_back(r.recovered.front());
        CHECK(!recovery_is_well_formed(view, doubled));
        AttackResult loop = r;
        // s1 feeds sum; make s1 read from sum
        const GateId s1 = *g.find("s1"), sum = *g.find("sum");
        for (auto &e : loop.recovered)
            if (e.sink.cell == s1 && e.sink.pin == 0)
                e.driver = sum;
        CHECK(!recovery_is_well_formed(view, loop));
    }

    TEST_CASE("recovered netlist export")
    {
        const NetlistGraph g = fixtures::full_adder();
        const FeolView view = feol_view(g, fixtures::random_layout(g, 5, 5, 2));
        AttackResult truth;
        truth.recovered = ground_truth(g);
        const NetlistGraph back = parse_bench(recovered_bench(view, truth));
        CHECK(stats(back) == stats(g));
        CHECK(back.edges().size() == g.edges().size());

        AttackResult partial = truth;
        partial.unresolved.push_back(partial.recovered.back().sink);
        partial.recovered.pop_back();
        const std::string text = recovered_bench(view, partial);
        CHECK(text.find("INPUT(UNRESOLVED_0)") != std::string::npos);
        CHECK(stats(parse_bench(text)).input_count == 4);
    }

    TEST_CASE("attacks are deterministic")
    {
        const NetlistGraph g = fixtures::random_dag({6, 80, 5}, 12);
        const FeolView view = feol_view(g, fixtures::random_layout(g, 12, 12, 12));
        CHECK(greedy_proximity_attack(view).recovered == greedy_proximity_attack(view).recovered);
        CHECK(assignment_attack(view).recovered == assignment_attack(view).recovered);
    }

    TEST_CASE("g-color lowers the greedy rate on the full adder")
    {
        const NetlistGraph g = fixtures::full_adder();
        const auto truth = ground_truth(g);
        double plain = 0, colored = 0;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            const Placement a = place(g, floorplan(identity_partition(g), g, 0.8), seed, 100);
            const Placement b = place(g, floorplan(g_color(g, seed), g, 0.8), seed, 100);
            plain += score(truth, greedy_proximity_attack(feol_view(g, a)).recovered).rate;
            colored += score(truth, greedy_proximity_attack(feol_view(g, b)).recovered).rate;
        }
        MESSAGE("mean rate unprotected " << plain / 20 << ", g-color " << colored / 20);
        CHECK(plain >= colored);
    }
}
