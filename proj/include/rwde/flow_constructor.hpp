#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwde/errors.hpp"
#include "rwde/maxflow.hpp"
#include "rwde/torus.hpp"
#include "rwde/unit_flows.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! Materialize homogeneous-plus-boost capacities on a torus, identifying
//! vertex coordinates with lattice representatives in [-N/2, N/2)^d. The
//! boosted edge (if any) sits at the origin, torus vertex 0.
inline EdgeField capacity_field(const TorusGraph& g, const BoostedCapacity& cap) {
    if (g.d != cap.w.d) throw std::invalid_argument("capacity_field: dimension mismatch");
    EdgeField field(g, 0.0);
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        const auto point = g.lattice_point(v);
        for (int dir = 0; dir < g.degree(); ++dir)
            field[g.edge_index(v, dir)] = cap.at(point, dir);
    }
    return field;
}

//! Number of lattice points of Z^d with L1 norm at most r.
inline std::int64_t lattice_ball_size(int d, int r) {
    if (r < 0) return 0;
    // sphere sizes by dynamic programming over dimensions
    std::vector<std::int64_t> counts(static_cast<std::size_t>(r) + 1, 0);
    counts[0] = 1;  // d = 0
    for (int dim = 1; dim <= d; ++dim) {
        std::vector<std::int64_t> next(counts.size(), 0);
        for (int norm = 0; norm <= r; ++norm) {
            next[static_cast<std::size_t>(norm)] = counts[static_cast<std::size_t>(norm)];  // coordinate 0
            for (int step = 1; step <= norm; ++step)
                next[static_cast<std::size_t>(norm)] += 2 * counts[static_cast<std::size_t>(norm - step)];
        }
        counts = std::move(next);
    }
    std::int64_t total = 0;
    for (auto c : counts) total += c;
    return total;
}

//! Minimal capacity over cut-sets separating the origin from the boundary of
//! the L1 ball of radius R (every edge leaving the ball is wired to a super
//! sink). The value is nonincreasing in R and upper-bounds the min-cut of the
//! full lattice problem.
inline double min_cut_truncated_lattice(const BoostedCapacity& cap, int R) {
    const int d = cap.w.d;
    if (R < 1) throw std::invalid_argument("truncated min-cut: radius must be >= 1");

    // enumerate the ball and index it
    std::vector<std::vector<long long>> points;
    std::map<std::vector<long long>, std::int64_t> index;
    std::vector<long long> p(static_cast<std::size_t>(d), 0);
    // iterative odometer over [-R, R]^d filtered by L1 norm
    std::fill(p.begin(), p.end(), -R);
    for (;;) {
        long long norm = 0;
        for (long long c : p) norm += std::llabs(c);
        if (norm <= R) {
            index.emplace(p, static_cast<std::int64_t>(points.size()));
            points.push_back(p);
        }
        int axis = 0;
        for (; axis < d; ++axis) {
            if (p[static_cast<std::size_t>(axis)] < R) {
                ++p[static_cast<std::size_t>(axis)];
                break;
            }
            p[static_cast<std::size_t>(axis)] = -R;
        }
        if (axis == d) break;
    }

    Digraph g;
    const auto ball = static_cast<std::int64_t>(points.size());
    g.vertices = ball + 1;
    const std::int64_t sink = ball;
    for (std::int64_t i = 0; i < ball; ++i) {
        const auto& x = points[static_cast<std::size_t>(i)];
        for (int dir = 0; dir < 2 * d; ++dir) {
            auto head = x;
            const int axis = dir < d ? dir : dir - d;
            head[static_cast<std::size_t>(axis)] += dir < d ? 1 : -1;
            const double c = cap.at(x, dir);
            const auto it = index.find(head);
            g.add_arc(i, it == index.end() ? sink : it->second, c);
        }
    }
    const auto origin = index.at(std::vector<long long>(static_cast<std::size_t>(d), 0));
    return max_flow_min_cut(g, origin, sink).value;
}

struct ThetaOptions {
    double cap_lower = 0.0;   // C'; 0 selects 0.99 * min capacity
    double cap_upper = 0.0;   // C''; 0 selects 1.01 * max capacity
    int unit_flow_samples = 1024;
    int threads = 1;
    bool strict_size_guard = false;  // enforce N >= N_0 instead of recording it
};

//! Everything the constructor did, for inspection and verification.
struct FlowConstructionTrace {
    EdgeField theta_tilde;      // dispersed aggregate before capacity repair
    EdgeField theta;            // final flow
    double strength = 0.0;
    double cap_lower = 0.0;     // C'
    double cap_upper = 0.0;     // C''
    int eta0 = 0;               // radius outside which theta_tilde <= C'/2
    int eta1_nominal = 0;       // eta0 + ceil(2 m / C')
    int eta1_used = 0;          // smallest modification radius that was feasible
    std::int64_t n0 = 0;        // side length needed by the a-priori guarantee
    bool n0_satisfied = false;
    int feasibility_attempts = 0;
    double divergence_error = 0.0;
    double l2_theta_tilde = 0.0;
    double l2_theta = 0.0;
    double l2_bound = 0.0;      // tail of theta_tilde plus modified-ball budget
    bool dominated = false;     // theta <= capacities edgewise, exact
};

namespace detail {

//! max(dist(0,tail), dist(0,head)): the edge lies in the radius-r edge ball
//! exactly when this is <= r.
inline std::vector<int> edge_radii(const TorusGraph& g) {
    std::vector<int> radii(static_cast<std::size_t>(g.edge_count()));
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        const int dv = g.distance(0, v);
        for (int dir = 0; dir < g.degree(); ++dir) {
            const int dh = g.distance(0, g.neighbor(v, dir));
            radii[static_cast<std::size_t>(g.edge_index(v, dir))] = std::max(dv, dh);
        }
    }
    return radii;
}

inline std::vector<int> edge_touch_radii(const TorusGraph& g) {
    std::vector<int> radii(static_cast<std::size_t>(g.edge_count()));
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        const int dv = g.distance(0, v);
        for (int dir = 0; dir < g.degree(); ++dir) {
            const int dh = g.distance(0, g.neighbor(v, dir));
            radii[static_cast<std::size_t>(g.edge_index(v, dir))] = std::min(dv, dh);
        }
    }
    return radii;
}

}  // namespace detail

//! Build a flow of the given strength from the origin to the uniform measure
//! on the torus, dominated by the capacities and with N-uniform L2 mass.
//!
//! Pipeline: aggregate dispersed unit flows into theta_tilde; find the radius
//! eta0 outside which theta_tilde is below C'/2; keep original capacities on a
//! ball of radius eta1 and cap everything else at theta_tilde; route the
//! uniform demands through the repaired capacities. eta1 starts just above
//! eta0 and grows only if the repair is infeasible; the a-priori radius
//! eta0 + ceil(2m/C') and its side-length requirement N_0 are recorded (and
//! enforced when the strict guard is on). Infeasibility with the unmodified
//! capacities is an input error reported with its violating cut.
inline FlowConstructionTrace construct_theta_n(const TorusGraph& g, const EdgeField& capacities,
                                               double strength, std::uint64_t seed,
                                               const ThetaOptions& opts = {}) {
    if (!(capacities.graph == g)) throw std::invalid_argument("construct_theta_n: mismatched capacities");
    if (!(strength > 0.0)) throw std::invalid_argument("construct_theta_n: strength must be positive");
    if (g.d < 3) throw std::invalid_argument("construct_theta_n: requires dimension >= 3");

    double cap_min = capacities.values[0];
    double cap_max = capacities.values[0];
    for (double c : capacities.values) {
        cap_min = std::min(cap_min, c);
        cap_max = std::max(cap_max, c);
    }
    if (!(cap_min > 0.0)) throw std::invalid_argument("construct_theta_n: capacities must be positive");

    FlowConstructionTrace trace;
    trace.strength = strength;
    trace.cap_lower = opts.cap_lower > 0.0 ? opts.cap_lower : 0.99 * cap_min;
    trace.cap_upper = opts.cap_upper > 0.0 ? opts.cap_upper : 1.01 * cap_max;
    if (!(trace.cap_lower < cap_min) || !(cap_max < trace.cap_upper))
        throw std::invalid_argument("construct_theta_n: need cap_lower < capacities < cap_upper");

    trace.theta_tilde = aggregate_flow(g, strength, opts.unit_flow_samples, seed, opts.threads);
    trace.l2_theta_tilde = l2_squared(trace.theta_tilde);

    const auto radii = detail::edge_radii(g);
    const auto touch = detail::edge_touch_radii(g);
    const double half_lower = 0.5 * trace.cap_lower;
    int eta0 = 0;
    for (std::size_t e = 0; e < radii.size(); ++e)
        if (trace.theta_tilde.values[e] > half_lower) eta0 = std::max(eta0, radii[e]);
    trace.eta0 = eta0;

    const int diameter = g.d * (g.N / 2);
    trace.eta1_nominal = eta0 + static_cast<int>(std::ceil(2.0 * strength / trace.cap_lower));
    trace.n0 = std::max<std::int64_t>(
        2 * static_cast<std::int64_t>(trace.eta1_nominal),
        static_cast<std::int64_t>(std::ceil(std::pow(
            strength * static_cast<double>(lattice_ball_size(g.d, trace.eta1_nominal)) / trace.cap_lower,
            1.0 / static_cast<double>(g.d)))));
    trace.n0_satisfied = g.N >= trace.n0;
    if (opts.strict_size_guard && !trace.n0_satisfied)
        throw std::invalid_argument("construct_theta_n: torus side " + std::to_string(g.N) +
                                    " below the a-priori requirement N_0 = " + std::to_string(trace.n0));

    const std::int64_t n = g.vertex_count();
    std::vector<double> demands(static_cast<std::size_t>(n), strength / static_cast<double>(n));
    FeasibleFlowResult feasible;
    int eta1 = std::min(std::max(eta0 + 1, 1), diameter);
    for (;; ++eta1) {
        EdgeField repaired(g, 0.0);
        for (std::size_t e = 0; e < repaired.values.size(); ++e)
            repaired.values[e] = touch[e] <= eta1 ? capacities.values[e]
                                                  : std::min(trace.theta_tilde.values[e], capacities.values[e]);
        FlowProblem problem{torus_digraph(g, repaired), 0, demands};
        feasible = feasible_flow(problem);
        ++trace.feasibility_attempts;
        if (feasible.feasible || eta1 >= diameter) break;
    }
    trace.eta1_used = eta1;
    if (!feasible.feasible) {
        std::string msg = "construct_theta_n: infeasible even with unmodified capacities; cut of capacity " +
                          std::to_string(feasible.violating_cut.capacity) + " over " +
                          std::to_string(feasible.violating_cut.vertices.size()) +
                          " vertices misses demand by " + std::to_string(feasible.cut_deficiency);
        throw invariant_violation(msg);
    }

    trace.theta = EdgeField(g, 0.0);
    trace.theta.values = std::move(feasible.theta);
    trace.theta.graph = g;

    // postconditions
    const VertexField div = divergence(trace.theta);
    const double volume = static_cast<double>(n);
    double div_err = 0.0;
    for (Vertex v = 0; v < n; ++v) {
        const double target = v == 0 ? strength * (volume - 1.0) / volume : -strength / volume;
        div_err = std::max(div_err, std::abs(div[v] - target));
    }
    trace.divergence_error = div_err;
    if (div_err > 1e-9)
        throw invariant_violation("construct_theta_n: divergence error above 1e-9");

    trace.dominated = true;
    for (std::size_t e = 0; e < trace.theta.values.size(); ++e)
        if (trace.theta.values[e] > capacities.values[e]) trace.dominated = false;
    if (!trace.dominated) throw invariant_violation("construct_theta_n: capacity domination violated");

    double tail = 0.0;
    std::int64_t modified_ball_edges = 0;
    for (std::size_t e = 0; e < trace.theta.values.size(); ++e) {
        if (touch[e] <= trace.eta1_used)
            ++modified_ball_edges;
        else
            tail += trace.theta_tilde.values[e] * trace.theta_tilde.values[e];
    }
    trace.l2_theta = l2_squared(trace.theta);
    trace.l2_bound = tail + static_cast<double>(modified_ball_edges) * trace.cap_upper * trace.cap_upper;
    if (trace.l2_theta > trace.l2_bound)
        throw invariant_violation("construct_theta_n: L2 bound violated");
    return trace;
}

}  // namespace rwde
