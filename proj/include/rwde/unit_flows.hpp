#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "rwde/errors.hpp"
#include "rwde/rng.hpp"
#include "rwde/torus.hpp"

namespace rwde {

//! Unit flow along a fixed walk: +1/-1 cancellation applies automatically
//! because values accumulate per directed edge.
inline EdgeField path_flow(const TorusGraph& g, Vertex start, const std::vector<int>& step_dirs) {
    EdgeField theta(g, 0.0);
    Vertex v = start;
    for (int dir : step_dirs) {
        if (dir < 0 || dir >= g.degree()) throw std::invalid_argument("path_flow: bad direction");
        theta[g.edge_index(v, dir)] += 1.0;
        v = g.neighbor(v, dir);
    }
    return theta;
}

//! Coordinatewise-monotone lattice path from 0 to y that tracks the two-leg
//! polygonal line through the interior point u (componentwise 0 <= u <= y,
//! sum(u) = |y|/2). Returns one axis per step; simultaneous integer crossings
//! are ordered by axis. The path stays within sup-distance 2d of the line.
inline std::vector<int> canonical_discrete_path(const std::vector<long long>& y,
                                                const std::vector<double>& u) {
    const std::size_t d = y.size();
    if (u.size() != d) throw std::invalid_argument("canonical path: dimension mismatch");
    long long norm = 0;
    for (std::size_t i = 0; i < d; ++i) {
        if (y[i] < 0) throw std::invalid_argument("canonical path: target must be nonnegative");
        if (u[i] < -1e-12 || u[i] > static_cast<double>(y[i]) + 1e-12)
            throw std::invalid_argument("canonical path: u outside the box [0,y]");
        norm += y[i];
    }
    double u_sum = 0.0;
    for (double x : u) u_sum += x;
    const double half = 0.5 * static_cast<double>(norm);
    if (std::abs(u_sum - half) > 1e-9 * std::max(1.0, half))
        throw std::invalid_argument("canonical path: u must sit on the half-norm slice");

    // crossing times of successive integer levels along each axis
    std::vector<std::pair<double, int>> events;
    events.reserve(static_cast<std::size_t>(norm));
    for (std::size_t i = 0; i < d; ++i) {
        for (long long m = 1; m <= y[i]; ++m) {
            const auto level = static_cast<double>(m);
            double t;
            if (level <= u[i])
                t = half * level / u[i];
            else
                t = half + half * (level - u[i]) / (static_cast<double>(y[i]) - u[i]);
            events.emplace_back(t, static_cast<int>(i));
        }
    }
    std::sort(events.begin(), events.end());
    std::vector<int> steps;
    steps.reserve(events.size());
    for (const auto& [t, axis] : events) steps.push_back(axis);
    return steps;
}

namespace detail {

struct TorusDisplacement {
    std::vector<long long> magnitude;  // per axis, 0 or in [N/2, N)
    std::vector<int> direction;        // signed direction index realizing the move
    long long norm = 0;
};

//! Reduce a target vertex to the monotone normal form: translate the source to
//! the origin and reflect axes so every nonzero displacement lies in [N/2, N).
inline TorusDisplacement monotone_displacement(const TorusGraph& g, Vertex x, Vertex y) {
    const auto cx = g.coords(x);
    const auto cy = g.coords(y);
    TorusDisplacement out;
    out.magnitude.resize(static_cast<std::size_t>(g.d));
    out.direction.resize(static_cast<std::size_t>(g.d));
    for (int i = 0; i < g.d; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        int delta = cy[idx] - cx[idx];
        if (delta < 0) delta += g.N;
        if (delta == 0) {
            out.magnitude[idx] = 0;
            out.direction[idx] = i;
        } else if (2 * delta >= g.N) {
            out.magnitude[idx] = delta;
            out.direction[idx] = i;  // +e_i
        } else {
            out.magnitude[idx] = g.N - delta;
            out.direction[idx] = i + g.d;  // -e_i
        }
        out.norm += out.magnitude[idx];
    }
    return out;
}

//! Uniform point of the slice {0 <= u <= y, sum(u) = |y|/2}: uniform simplex
//! draws (flat Dirichlet) with rejection against the box constraint.
inline std::vector<double> sample_slice_point(const std::vector<long long>& y, long long norm, Rng& rng) {
    const std::size_t d = y.size();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < d; ++i)
        if (y[i] > 0) active.push_back(i);
    std::vector<double> u(d, 0.0);
    if (active.empty()) return u;
    const double half = 0.5 * static_cast<double>(norm);
    if (active.size() == 1) {
        u[active[0]] = half;
        return u;
    }
    const std::vector<double> flat(active.size(), 1.0);
    std::vector<double> point(active.size());
    for (int attempt = 0; attempt < 100000; ++attempt) {
        rng.dirichlet(flat, point);
        bool ok = true;
        for (std::size_t j = 0; j < active.size(); ++j) {
            point[j] *= half;
            if (point[j] > static_cast<double>(y[active[j]])) {
                ok = false;
                break;
            }
        }
        if (ok) {
            for (std::size_t j = 0; j < active.size(); ++j) u[active[j]] = point[j];
            return u;
        }
    }
    throw numerical_error("dispersed flow: slice sampling failed to accept");
}

}  // namespace detail

//! Monte Carlo average of canonical-path unit flows from x to y over uniformly
//! dispersed interior points. The result is an exact unit flow (divergence
//! delta_x - delta_y) for any sample count; sampling only affects how evenly
//! it spreads. Vertex throughput never exceeds 1.
inline EdgeField dispersed_unit_flow(const TorusGraph& g, Vertex x, Vertex y, int samples, Rng& rng) {
    if (samples < 1) throw std::invalid_argument("dispersed_unit_flow: need at least one sample");
    EdgeField theta(g, 0.0);
    if (x == y) return theta;
    const auto disp = detail::monotone_displacement(g, x, y);
    const double weight = 1.0 / static_cast<double>(samples);
    for (int s = 0; s < samples; ++s) {
        const auto u = detail::sample_slice_point(disp.magnitude, disp.norm, rng);
        const auto axes = canonical_discrete_path(disp.magnitude, u);
        Vertex v = x;
        for (int axis : axes) {
            const int dir = disp.direction[static_cast<std::size_t>(axis)];
            theta[g.edge_index(v, dir)] += weight;
            v = g.neighbor(v, dir);
        }
        if (v != y) throw invariant_violation("dispersed_unit_flow: path missed its target");
    }
    return theta;
}

//! Vertex throughput (total outflow) of a nonnegative edge field.
inline VertexField throughput(const EdgeField& theta) {
    const TorusGraph& g = theta.graph;
    VertexField out(g, 0.0);
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v)
        for (int dir = 0; dir < g.degree(); ++dir) out[v] += theta[g.edge_index(v, dir)];
    return out;
}

//! Superposition of dispersed unit flows from the origin to every vertex,
//! scaled to strength/N^d each: divergence is exactly
//! strength * (delta_0 - uniform). Per-target sampling streams are derived
//! from (seed, target), and partial sums are reduced in a fixed block order,
//! so the result does not depend on the number of threads.
inline EdgeField aggregate_flow(const TorusGraph& g, double strength, int samples,
                                std::uint64_t seed, int threads = 1) {
    const std::int64_t n = g.vertex_count();
    const double scale = strength / static_cast<double>(n);
    if (threads < 1) threads = 1;

    auto accumulate_target = [&](EdgeField& into, Vertex target) {
        if (target == 0) return;
        Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(target));
        const EdgeField flow = dispersed_unit_flow(g, 0, target, samples, rng);
        for (std::size_t e = 0; e < into.values.size(); ++e) into.values[e] += scale * flow.values[e];
    };

    // Block-structured reduction: identical grouping for every thread count.
    constexpr std::int64_t block_size = 256;
    const std::int64_t blocks = (n + block_size - 1) / block_size;
    auto run_block = [&](std::int64_t b) {
        EdgeField local(g, 0.0);
        const Vertex lo = b * block_size;
        const Vertex hi = std::min<std::int64_t>(n, lo + block_size);
        for (Vertex target = lo; target < hi; ++target) accumulate_target(local, target);
        return local;
    };

    std::vector<EdgeField> partial(static_cast<std::size_t>(blocks));
    if (threads == 1) {
        for (std::int64_t b = 0; b < blocks; ++b) partial[static_cast<std::size_t>(b)] = run_block(b);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&, w] {
                for (std::int64_t b = w; b < blocks; b += threads)
                    partial[static_cast<std::size_t>(b)] = run_block(b);
            });
        for (auto& t : pool) t.join();
    }

    EdgeField total(g, 0.0);
    for (auto& block : partial)
        for (std::size_t e = 0; e < total.values.size(); ++e) total.values[e] += block.values[e];
    return total;
}

}  // namespace rwde
