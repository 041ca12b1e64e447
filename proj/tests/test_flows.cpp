#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rwde/maxflow.hpp"
#include "rwde/rng.hpp"
#include "rwde/torus.hpp"

using namespace rwde;

namespace {

// Exhaustive minimum cut: scan every source-side subset containing s and
// excluding t. Only usable for tiny graphs; serves as an independent oracle.
double brute_force_min_cut(const Digraph& g, std::int64_t s, std::int64_t t) {
    const int n = static_cast<int>(g.vertices);
    double best = std::numeric_limits<double>::infinity();
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!(mask & (1u << s)) || (mask & (1u << t))) continue;
        double cap = 0.0;
        for (const auto& a : g.arcs)
            if ((mask & (1u << a.tail)) && !(mask & (1u << a.head))) cap += a.capacity;
        best = std::min(best, cap);
    }
    return best;
}

// Exhaustive feasibility: demands outside every source side must be coverable
// by the arcs leaving that side.
bool brute_force_feasible(const Digraph& g, std::int64_t s, const std::vector<double>& demands) {
    const int n = static_cast<int>(g.vertices);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (!(mask & (1u << s))) continue;
        double cap = 0.0;
        for (const auto& a : g.arcs)
            if ((mask & (1u << a.tail)) && !(mask & (1u << a.head))) cap += a.capacity;
        double need = 0.0;
        for (int v = 0; v < n; ++v)
            if (!(mask & (1u << v))) need += demands[static_cast<std::size_t>(v)];
        if (need > cap + 1e-9) return false;
    }
    return true;
}

Digraph random_digraph(Rng& rng, int max_vertices) {
    Digraph g;
    g.vertices = 2 + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(max_vertices - 1)));
    for (std::int64_t u = 0; u < g.vertices; ++u)
        for (std::int64_t v = 0; v < g.vertices; ++v) {
            if (u == v) continue;
            if (rng.uniform() < 0.35) {
                // quarter-integer capacities keep every comparison exact
                const double cap = 0.25 * static_cast<double>(1 + rng.uniform_below(16));
                g.add_arc(u, v, cap);
            }
        }
    return g;
}

}  // namespace

TEST_CASE("single arc saturates", "[maxflow]") {
    Digraph g;
    g.vertices = 2;
    g.add_arc(0, 1, 3.5);
    const auto res = max_flow_min_cut(g, 0, 1);
    REQUIRE(res.value == 3.5);
    REQUIRE(res.flow[0] == 3.5);
    REQUIRE(res.min_cut.capacity == 3.5);
    REQUIRE(res.min_cut.vertices == std::vector<std::int64_t>{0});
    REQUIRE(res.min_cut.arcs == std::vector<std::size_t>{0});
}

TEST_CASE("diamond network has value four", "[maxflow]") {
    // s=0, a=1, b=2, t=3
    Digraph g;
    g.vertices = 4;
    g.add_arc(0, 1, 3.0);
    g.add_arc(0, 2, 2.0);
    g.add_arc(1, 3, 2.0);
    g.add_arc(2, 3, 2.0);
    g.add_arc(1, 2, 1.0);
    const auto res = max_flow_min_cut(g, 0, 3);
    REQUIRE(res.value == Catch::Approx(4.0).epsilon(1e-15));
    REQUIRE(res.min_cut.capacity == Catch::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("disconnected sink gives zero flow and an empty cut", "[maxflow]") {
    Digraph g;
    g.vertices = 3;
    g.add_arc(0, 1, 1.0);  // vertex 2 unreachable
    const auto res = max_flow_min_cut(g, 0, 2);
    REQUIRE(res.value == 0.0);
    REQUIRE(res.min_cut.capacity == 0.0);
}

TEST_CASE("random graphs match the exhaustive minimum cut", "[maxflow]") {
    Rng rng(314);
    for (int trial = 0; trial < 300; ++trial) {
        const Digraph g = random_digraph(rng, 8);
        const std::int64_t s = 0;
        const std::int64_t t = g.vertices - 1;
        const auto res = max_flow_min_cut(g, s, t);
        const double oracle = brute_force_min_cut(g, s, t);
        REQUIRE(res.value == Catch::Approx(oracle).margin(1e-9));
        REQUIRE(res.min_cut.capacity == Catch::Approx(oracle).margin(1e-9));

        // flow is feasible: within capacity and conserved off the terminals
        std::vector<double> net(static_cast<std::size_t>(g.vertices), 0.0);
        for (std::size_t i = 0; i < g.arcs.size(); ++i) {
            REQUIRE(res.flow[i] >= 0.0);
            REQUIRE(res.flow[i] <= g.arcs[i].capacity);
            net[static_cast<std::size_t>(g.arcs[i].tail)] += res.flow[i];
            net[static_cast<std::size_t>(g.arcs[i].head)] -= res.flow[i];
        }
        for (std::int64_t v = 0; v < g.vertices; ++v) {
            if (v == s || v == t) continue;
            REQUIRE(std::abs(net[static_cast<std::size_t>(v)]) < 1e-9);
        }
        REQUIRE(net[static_cast<std::size_t>(s)] == Catch::Approx(res.value).margin(1e-9));

        // the reported cut really separates: s inside, t outside, arcs leave the set
        const auto& side = res.min_cut.vertices;
        REQUIRE(std::binary_search(side.begin(), side.end(), s));
        REQUIRE(!std::binary_search(side.begin(), side.end(), t));
        double cut_cap = 0.0;
        for (std::size_t arc : res.min_cut.arcs) cut_cap += g.arcs[arc].capacity;
        REQUIRE(cut_cap == Catch::Approx(res.min_cut.capacity).margin(1e-12));
    }
}

TEST_CASE("reported cut side is connected to the source", "[maxflow]") {
    Rng rng(271);
    for (int trial = 0; trial < 50; ++trial) {
        const Digraph g = random_digraph(rng, 8);
        const auto res = max_flow_min_cut(g, 0, g.vertices - 1);
        const auto& side = res.min_cut.vertices;
        // walk forward from the source using only arcs inside the side
        std::vector<char> in_side(static_cast<std::size_t>(g.vertices), 0);
        for (auto v : side) in_side[static_cast<std::size_t>(v)] = 1;
        std::vector<char> seen(static_cast<std::size_t>(g.vertices), 0);
        seen[0] = 1;
        bool grew = true;
        while (grew) {
            grew = false;
            for (const auto& a : g.arcs)
                if (seen[static_cast<std::size_t>(a.tail)] && in_side[static_cast<std::size_t>(a.head)] &&
                    !seen[static_cast<std::size_t>(a.head)]) {
                    seen[static_cast<std::size_t>(a.head)] = 1;
                    grew = true;
                }
        }
        for (auto v : side) REQUIRE(seen[static_cast<std::size_t>(v)] == 1);
    }
}

TEST_CASE("torus digraph mirrors edge indexing", "[maxflow]") {
    const TorusGraph g(3, 3);
    EdgeField caps(g, 0.0);
    Rng rng(6);
    for (auto& c : caps.values) c = 0.5 + rng.uniform();
    const Digraph dg = torus_digraph(g, caps);
    REQUIRE(dg.vertices == g.vertex_count());
    REQUIRE(dg.arcs.size() == static_cast<std::size_t>(g.edge_count()));
    for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
        const auto& a = dg.arcs[static_cast<std::size_t>(e)];
        REQUIRE(a.tail == g.edge_tail(e));
        REQUIRE(a.head == g.neighbor(g.edge_tail(e), g.edge_direction(e)));
        REQUIRE(a.capacity == caps[e]);
    }
}

TEST_CASE("cut capacities add over separated vertex groups", "[maxflow]") {
    // out-arc capacity is a sum over arcs, so two groups with no arcs between
    // them cut exactly the sum of their individual out-capacities
    const TorusGraph g(3, 8);
    EdgeField caps(g, 0.0);
    Rng rng(11);
    for (auto& c : caps.values) c = rng.uniform();
    auto out_capacity = [&](const std::vector<Vertex>& group) {
        double acc = 0.0;
        for (Vertex v : group)
            for (int dir = 0; dir < g.degree(); ++dir) {
                const Vertex head = g.neighbor(v, dir);
                if (std::find(group.begin(), group.end(), head) == group.end())
                    acc += caps[g.edge_index(v, dir)];
            }
        return acc;
    };
    const std::vector<Vertex> a = {0, g.neighbor(0, 0)};
    const std::vector<Vertex> b = {g.vertex({4, 4, 4}), g.vertex({4, 5, 4})};
    std::vector<Vertex> both = a;
    both.insert(both.end(), b.begin(), b.end());
    REQUIRE(out_capacity(both) == Catch::Approx(out_capacity(a) + out_capacity(b)).epsilon(1e-12));
}

TEST_CASE("feasible transport problems are routed exactly", "[feasible]") {
    Digraph g;
    g.vertices = 4;
    g.add_arc(0, 1, 2.0);
    g.add_arc(1, 2, 1.5);
    g.add_arc(0, 3, 1.0);
    FlowProblem prob{g, 0, {0.0, 0.5, 1.5, 0.5}};
    const auto res = feasible_flow(prob);
    REQUIRE(res.feasible);
    REQUIRE(res.total_demand == Catch::Approx(2.5));
    REQUIRE(res.routed == Catch::Approx(2.5).margin(1e-12));

    // conservation: net outflow at v equals -demand(v) for non-sources
    std::vector<double> net(4, 0.0);
    for (std::size_t i = 0; i < g.arcs.size(); ++i) {
        REQUIRE(res.theta[i] >= -1e-15);
        REQUIRE(res.theta[i] <= g.arcs[i].capacity + 1e-15);
        net[static_cast<std::size_t>(g.arcs[i].tail)] += res.theta[i];
        net[static_cast<std::size_t>(g.arcs[i].head)] -= res.theta[i];
    }
    for (int v = 1; v < 4; ++v)
        REQUIRE(net[static_cast<std::size_t>(v)] == Catch::Approx(-prob.demands[static_cast<std::size_t>(v)]).margin(1e-12));
}

TEST_CASE("infeasible demand reports a violating cut", "[feasible]") {
    Digraph g;
    g.vertices = 2;
    g.add_arc(0, 1, 1.0);
    FlowProblem prob{g, 0, {0.0, 2.0}};
    const auto res = feasible_flow(prob);
    REQUIRE(!res.feasible);
    REQUIRE(res.cut_deficiency == Catch::Approx(1.0).margin(1e-12));
    // cut {0}: capacity 1 < demand 2 beyond it
    REQUIRE(res.violating_cut.vertices == std::vector<std::int64_t>{0});
    REQUIRE(res.violating_cut.capacity == Catch::Approx(1.0));
}

TEST_CASE("zero demand is trivially feasible", "[feasible]") {
    Digraph g;
    g.vertices = 3;
    g.add_arc(0, 1, 1.0);
    g.add_arc(1, 2, 1.0);
    FlowProblem prob{g, 0, {0.0, 0.0, 0.0}};
    const auto res = feasible_flow(prob);
    REQUIRE(res.feasible);
    for (double t : res.theta) REQUIRE(t == 0.0);
}

TEST_CASE("feasibility verdict matches the exhaustive cut condition", "[feasible]") {
    Rng rng(1618);
    int feasible_seen = 0, infeasible_seen = 0;
    for (int trial = 0; trial < 300; ++trial) {
        const Digraph g = random_digraph(rng, 7);
        std::vector<double> demands(static_cast<std::size_t>(g.vertices), 0.0);
        for (std::size_t v = 1; v < demands.size(); ++v)
            demands[v] = 0.25 * static_cast<double>(rng.uniform_below(6));
        FlowProblem prob{g, 0, demands};
        const auto res = feasible_flow(prob);
        const bool oracle = brute_force_feasible(g, 0, demands);
        REQUIRE(res.feasible == oracle);
        if (oracle) {
            ++feasible_seen;
        } else {
            ++infeasible_seen;
            REQUIRE(res.cut_deficiency > 0.0);
            double cap = 0.0, need = 0.0;
            for (std::size_t arc : res.violating_cut.arcs) cap += g.arcs[arc].capacity;
            std::vector<char> inside(static_cast<std::size_t>(g.vertices), 0);
            for (auto v : res.violating_cut.vertices) inside[static_cast<std::size_t>(v)] = 1;
            for (std::int64_t v = 0; v < g.vertices; ++v)
                if (!inside[static_cast<std::size_t>(v)]) need += demands[static_cast<std::size_t>(v)];
            REQUIRE(need > cap);  // the reported cut certifies infeasibility
        }
    }
    // the generator should exercise both branches
    REQUIRE(feasible_seen > 20);
    REQUIRE(infeasible_seen > 20);
}

TEST_CASE("digraph construction rejects malformed arcs", "[maxflow]") {
    Digraph g;
    g.vertices = 2;
    REQUIRE_THROWS_AS(g.add_arc(0, 0, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(g.add_arc(0, 5, 1.0), std::invalid_argument);
    REQUIRE_THROWS_AS(g.add_arc(0, 1, -1.0), std::invalid_argument);
    g.add_arc(0, 1, 1.0);
    REQUIRE_THROWS_AS(max_flow_min_cut(g, 0, 0), std::invalid_argument);
    REQUIRE_THROWS_AS(max_flow_min_cut(g, 0, 9), std::invalid_argument);
}
