#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "rwde/environment.hpp"
#include "rwde/errors.hpp"
#include "rwde/torus.hpp"

namespace rwde {

struct StationaryOptions {
    enum class Method { automatic, direct, iterative };
    Method method = Method::automatic;
    double tolerance = 1e-12;          // max-norm of pi P - pi
    std::int64_t max_iterations = 1000000;
    std::int64_t direct_limit = 20000;  // largest state count for the direct solver
};

struct StationarySolution {
    VertexField pi;
    double residual = 0.0;
    std::int64_t iterations = 0;
    std::string method;
    double min_entry = 0.0;
};

namespace detail {

//! Max-norm of pi^T P - pi^T for the walk kernel P of the environment.
inline double stationary_residual(const Environment& env, const std::vector<double>& pi) {
    const TorusGraph& g = env.graph;
    const std::int64_t n = g.vertex_count();
    std::vector<double> image(static_cast<std::size_t>(n), 0.0);
    for (Vertex v = 0; v < n; ++v) {
        const double mass = pi[static_cast<std::size_t>(v)];
        for (int dir = 0; dir < g.degree(); ++dir)
            image[static_cast<std::size_t>(g.neighbor(v, dir))] += mass * env.at(v, dir);
    }
    double res = 0.0;
    for (std::int64_t i = 0; i < n; ++i)
        res = std::max(res, std::abs(image[static_cast<std::size_t>(i)] - pi[static_cast<std::size_t>(i)]));
    return res;
}

inline void normalize_l1(std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    for (double& x : v) x /= s;
}

//! Solve (P^T - I) pi = 0 with the last row replaced by the normalization
//! constraint sum(pi) = 1.
inline std::vector<double> direct_solve(const Environment& env, bool dense, std::string& method_name) {
    const TorusGraph& g = env.graph;
    const auto n = static_cast<Eigen::Index>(g.vertex_count());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs[n - 1] = 1.0;

    Eigen::VectorXd solution;
    if (dense) {
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
        for (Vertex v = 0; v < n; ++v) {
            for (int dir = 0; dir < g.degree(); ++dir) {
                const auto head = static_cast<Eigen::Index>(g.neighbor(v, dir));
                if (head != n - 1) a(head, static_cast<Eigen::Index>(v)) += env.at(v, dir);
            }
            if (static_cast<Eigen::Index>(v) != n - 1) a(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v)) -= 1.0;
        }
        a.row(n - 1).setOnes();
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
        solution = lu.solve(rhs);
        // one step of iterative refinement tightens ill-conditioned solves
        solution += lu.solve(rhs - a * solution);
        if (!solution.allFinite()) {
            solution = a.colPivHouseholderQr().solve(rhs);
            method_name = "direct-dense-qr";
        } else {
            method_name = "direct-dense";
        }
    } else {
        using Triplet = Eigen::Triplet<double>;
        std::vector<Triplet> triplets;
        triplets.reserve(static_cast<std::size_t>(g.edge_count() + n));
        for (Vertex v = 0; v < n; ++v) {
            for (int dir = 0; dir < g.degree(); ++dir) {
                const auto head = static_cast<Eigen::Index>(g.neighbor(v, dir));
                if (head != n - 1)
                    triplets.emplace_back(head, static_cast<Eigen::Index>(v), env.at(v, dir));
            }
            if (static_cast<Eigen::Index>(v) != n - 1)
                triplets.emplace_back(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(v), -1.0);
        }
        for (Eigen::Index c = 0; c < n; ++c) triplets.emplace_back(n - 1, c, 1.0);
        Eigen::SparseMatrix<double> a(n, n);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.analyzePattern(a);
        lu.factorize(a);
        if (lu.info() != Eigen::Success) throw numerical_error("stationary: sparse LU factorization failed");
        solution = lu.solve(rhs);
        solution += lu.solve(rhs - a * solution);
        method_name = "direct-sparse";
    }
    if (!solution.allFinite()) throw numerical_error("stationary: direct solve produced non-finite entries");
    return {solution.data(), solution.data() + solution.size()};
}

}  // namespace detail

//! Stationary distribution of the quenched walk on the torus. Small systems
//! use a direct solve of the replaced-row linear system; large ones use power
//! iteration on the lazy kernel (I+P)/2, which kills the period-2 oscillation
//! on even tori.
inline StationarySolution stationary_distribution(const Environment& env,
                                                  const StationaryOptions& opts = {}) {
    const TorusGraph& g = env.graph;
    const std::int64_t n = g.vertex_count();
    const bool direct = opts.method == StationaryOptions::Method::direct ||
                        (opts.method == StationaryOptions::Method::automatic && n <= opts.direct_limit);

    StationarySolution sol;
    std::vector<double> pi;
    if (direct) {
        pi = detail::direct_solve(env, n <= 1024, sol.method);
        sol.iterations = 0;
    } else {
        sol.method = "iterative-lazy";
        pi.assign(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
        std::vector<double> image(static_cast<std::size_t>(n));
        std::int64_t it = 0;
        for (; it < opts.max_iterations; ++it) {
            std::fill(image.begin(), image.end(), 0.0);
            for (Vertex v = 0; v < n; ++v) {
                const double mass = pi[static_cast<std::size_t>(v)];
                for (int dir = 0; dir < g.degree(); ++dir)
                    image[static_cast<std::size_t>(g.neighbor(v, dir))] += mass * env.at(v, dir);
            }
            double diff = 0.0;
            for (std::int64_t i = 0; i < n; ++i) {
                const auto idx = static_cast<std::size_t>(i);
                diff = std::max(diff, std::abs(image[idx] - pi[idx]));
                pi[idx] = 0.5 * (pi[idx] + image[idx]);
            }
            detail::normalize_l1(pi);
            if (diff <= opts.tolerance) break;
        }
        sol.iterations = it + 1;
        if (it >= opts.max_iterations)
            throw numerical_error("stationary: power iteration did not converge");
    }

    // Direct solves of near-reducible chains can leave roundoff-scale negative
    // entries; clamp them and fail loudly on anything material.
    double max_entry = 0.0;
    for (double x : pi) max_entry = std::max(max_entry, x);
    for (double& x : pi) {
        if (x < 0.0) {
            if (x < -1e-9 * max_entry)
                throw numerical_error("stationary: solver produced a materially negative entry");
            x = 0.0;
        }
    }
    detail::normalize_l1(pi);

    sol.residual = detail::stationary_residual(env, pi);
    if (!(sol.residual <= opts.tolerance))
        throw numerical_error("stationary: residual " + std::to_string(sol.residual) +
                              " above tolerance");
    sol.min_entry = *std::min_element(pi.begin(), pi.end());
    sol.pi = VertexField(g);
    sol.pi.values = std::move(pi);
    return sol;
}

//! Density of the environment seen from the particle: f_N = N^d pi(0).
inline double density_f(const StationarySolution& sol) {
    return static_cast<double>(sol.pi.graph.vertex_count()) * sol.pi[0];
}

struct TimeReversal {
    Environment env;
    double max_row_error = 0.0;  // deviation of raw reversed rows from sum 1
};

//! Time-reversed environment: omega_hat(x,y) = pi(y) omega(y,x) / pi(x).
//! Rows are exactly normalized afterwards; the raw deviation is reported and
//! must be tiny if pi really is stationary.
inline TimeReversal time_reverse(const Environment& env, const StationarySolution& sol) {
    const TorusGraph& g = env.graph;
    const std::int64_t n = g.vertex_count();
    if (!(sol.pi.graph == g)) throw std::invalid_argument("time_reverse: mismatched graphs");
    if (!(sol.min_entry > 0.0))
        throw numerical_error("time_reverse: stationary distribution has a zero entry");

    std::vector<double> probs(static_cast<std::size_t>(g.edge_count()));
    double max_dev = 0.0;
    for (Vertex x = 0; x < n; ++x) {
        double row = 0.0;
        for (int dir = 0; dir < g.degree(); ++dir) {
            const Vertex y = g.neighbor(x, dir);
            const int back = opposite_direction(dir, g.d);
            const double value = sol.pi[y] * env.at(y, back) / sol.pi[x];
            probs[static_cast<std::size_t>(g.edge_index(x, dir))] = value;
            row += value;
        }
        max_dev = std::max(max_dev, std::abs(row - 1.0));
        for (int dir = 0; dir < g.degree(); ++dir)
            probs[static_cast<std::size_t>(g.edge_index(x, dir))] /= row;
    }
    if (max_dev > 1e-8)
        throw numerical_error("time_reverse: pi is not stationary to working precision");
    return TimeReversal{Environment(g, std::move(probs)), max_dev};
}

struct ReversalIdentity {
    double lhs = 0.0;  // sum theta_hat log omega_hat - sum theta log omega
    double rhs = 0.0;  // sum div(theta) log pi
    double abs_error = 0.0;
    double rel_error = 0.0;
};

//! The log-space quotient identity connecting a flow, the environment, its
//! reversal, and the stationary density. Holds for arbitrary real edge fields.
inline ReversalIdentity reversal_identity_check(const Environment& env, const StationarySolution& sol,
                                                const EdgeField& theta) {
    const TorusGraph& g = env.graph;
    if (!(theta.graph == g)) throw std::invalid_argument("reversal identity: mismatched graphs");
    const TimeReversal rev = time_reverse(env, sol);

    double lhs = 0.0;
    const std::int64_t edges = g.edge_count();
    for (EdgeIndex e = 0; e < edges; ++e) {
        const EdgeIndex rev_e = g.reverse_edge(e);
        // theta_hat(e) = theta(reverse of e)
        lhs += theta[rev_e] * std::log(rev.env[e]) - theta[e] * std::log(env[e]);
    }
    const VertexField div = divergence(theta);
    double rhs = 0.0;
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v)
        if (div[v] != 0.0) rhs += div[v] * std::log(sol.pi[v]);

    ReversalIdentity out;
    out.lhs = lhs;
    out.rhs = rhs;
    out.abs_error = std::abs(lhs - rhs);
    out.rel_error = out.abs_error / std::max(1.0, std::abs(rhs));
    return out;
}

struct DensityBound {
    double log_lhs = 0.0;  // p * log f_N
    double log_rhs = 0.0;  // log of the reversal quotient
    double divergence_error = 0.0;
    bool holds = false;
};

//! Pathwise moment bound: if div(theta) spreads p units from the origin evenly
//! over the torus, then p log f_N <= log(omega_hat^theta_hat / omega^theta).
inline DensityBound density_bound_check(const Environment& env, const StationarySolution& sol,
                                        const EdgeField& theta, double p) {
    const TorusGraph& g = env.graph;
    const double volume = static_cast<double>(g.vertex_count());
    const VertexField div = divergence(theta);
    double div_err = 0.0;
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        const double target = v == 0 ? p * (volume - 1.0) / volume : -p / volume;
        div_err = std::max(div_err, std::abs(div[v] - target));
    }
    if (div_err > 1e-9)
        throw std::invalid_argument("density bound: theta does not carry the required divergence");

    const TimeReversal rev = time_reverse(env, sol);
    double rhs = 0.0;
    const std::int64_t edges = g.edge_count();
    for (EdgeIndex e = 0; e < edges; ++e)
        rhs += theta[g.reverse_edge(e)] * std::log(rev.env[e]) - theta[e] * std::log(env[e]);

    DensityBound out;
    out.log_lhs = p * std::log(density_f(sol));
    out.log_rhs = rhs;
    out.divergence_error = div_err;
    out.holds = out.log_lhs <= rhs + 1e-8 * (1.0 + std::abs(rhs));
    return out;
}

}  // namespace rwde
