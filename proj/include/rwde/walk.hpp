#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "rwde/dirichlet_moments.hpp"
#include "rwde/environment.hpp"
#include "rwde/errors.hpp"
#include "rwde/rng.hpp"
#include "rwde/stats.hpp"
#include "rwde/torus.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! One simulated trajectory, tracked through unwrapped lattice coordinates.
struct Trajectory {
    int d = 0;
    std::int64_t steps = 0;
    std::vector<long long> displacement;                  // X_n - X_0 in Z^d
    std::vector<std::int64_t> checkpoint_steps;
    std::vector<std::vector<long long>> checkpoints;      // displacement at each checkpoint
    std::int64_t range = 0;                               // #distinct sites among X_0..X_{n-1}
    std::vector<std::int64_t> checkpoint_ranges;
    std::vector<int> step_directions;                     // filled only when recorded
};

namespace detail {

//! Distinct-site counter. For d <= 3 displacements stay well within +-2^20 for
//! any feasible step budget, so pack coordinates into a single 64-bit key;
//! otherwise fall back to ordered sets of coordinate vectors.
class RangeCounter {
public:
    explicit RangeCounter(int d) : d_(d), packed_(d <= 3) {}

    bool insert(std::span<const long long> x) {
        if (packed_) {
            std::uint64_t key = 0;
            for (int i = 0; i < d_; ++i) {
                const auto c = x[static_cast<std::size_t>(i)];
                if (c < -(1LL << 20) || c >= (1LL << 20))
                    throw invariant_violation("range counter: displacement out of packable range");
                key = (key << 21) | static_cast<std::uint64_t>(c + (1LL << 20));
            }
            return keys_.insert(key).second;
        }
        return vectors_.insert(std::vector<long long>(x.begin(), x.end())).second;
    }

    std::int64_t size() const {
        return packed_ ? static_cast<std::int64_t>(keys_.size())
                       : static_cast<std::int64_t>(vectors_.size());
    }

private:
    int d_;
    bool packed_;
    std::set<std::uint64_t> keys_;
    std::set<std::vector<long long>> vectors_;
};

inline void apply_step(std::vector<long long>& x, int dir, int d) {
    const int axis = dir < d ? dir : dir - d;
    x[static_cast<std::size_t>(axis)] += dir < d ? 1 : -1;
}

inline int sample_direction(std::span<const double> probs, Rng& rng) {
    const double u = rng.uniform();
    double acc = 0.0;
    const int last = static_cast<int>(probs.size()) - 1;
    for (int i = 0; i < last; ++i) {
        acc += probs[static_cast<std::size_t>(i)];
        if (u < acc) return i;
    }
    return last;
}

}  // namespace detail

//! Walk in a fixed environment on the torus, reported in unwrapped coordinates.
inline Trajectory simulate_quenched(const Environment& env, Vertex start, std::int64_t steps, Rng& rng,
                                    std::span<const std::int64_t> checkpoint_steps = {},
                                    bool record_directions = false) {
    if (steps < 0) throw std::invalid_argument("simulate_quenched: negative step count");
    const TorusGraph& g = env.graph;
    if (start < 0 || start >= g.vertex_count()) throw std::invalid_argument("simulate_quenched: bad start");
    std::vector<std::int64_t> marks(checkpoint_steps.begin(), checkpoint_steps.end());
    std::sort(marks.begin(), marks.end());
    for (std::int64_t m : marks)
        if (m < 0 || m > steps) throw std::invalid_argument("simulate_quenched: checkpoint out of range");

    Trajectory out;
    out.d = g.d;
    out.steps = steps;
    out.displacement.assign(static_cast<std::size_t>(g.d), 0);
    if (record_directions) out.step_directions.reserve(static_cast<std::size_t>(steps));

    // the counter holds X_0 .. X_{n-1} when the loop index is n, so a
    // checkpoint at n reports the distinct-site count of the first n positions
    detail::RangeCounter range(g.d);

    Vertex site = start;
    std::size_t next_mark = 0;
    const int degree = g.degree();
    for (std::int64_t n = 0; n <= steps; ++n) {
        while (next_mark < marks.size() && marks[next_mark] == n) {
            out.checkpoint_steps.push_back(n);
            out.checkpoints.push_back(out.displacement);
            out.checkpoint_ranges.push_back(range.size());
            ++next_mark;
        }
        if (n == steps) break;
        range.insert(out.displacement);
        const int dir = detail::sample_direction(
            std::span<const double>(env.probs.data() + site * degree, static_cast<std::size_t>(degree)), rng);
        if (record_directions) out.step_directions.push_back(dir);
        site = g.neighbor(site, dir);
        detail::apply_step(out.displacement, dir, g.d);
    }
    out.range = range.size();
    return out;
}

//! Walk under the averaged law: a directed-edge linearly reinforced walk on
//! Z^d whose step distribution at a site visited with direction counts N is
//! (alpha_i + N_i) / (sum alpha + sum N).
inline Trajectory simulate_annealed_reinforced(const Weights& w, std::int64_t steps, Rng& rng,
                                               bool record_directions = false) {
    w.validate();
    if (steps < 0) throw std::invalid_argument("simulate_annealed_reinforced: negative step count");
    const int d = w.d;
    const int degree = 2 * d;
    Trajectory out;
    out.d = d;
    out.steps = steps;
    out.displacement.assign(static_cast<std::size_t>(d), 0);
    if (record_directions) out.step_directions.reserve(static_cast<std::size_t>(steps));

    detail::RangeCounter range(d);
    range.insert(out.displacement);

    // crossing counts per visited site, keyed by packed displacement
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> counts;
    auto pack = [&](const std::vector<long long>& x) {
        std::uint64_t key = 0;
        for (int i = 0; i < d; ++i) {
            const auto c = x[static_cast<std::size_t>(i)];
            if (c < -(1LL << 20) || c >= (1LL << 20))
                throw invariant_violation("annealed walk: displacement out of packable range");
            key = (key << 21) | static_cast<std::uint64_t>(c + (1LL << 20));
        }
        return key;
    };
    if (d > 3) throw std::invalid_argument("simulate_annealed_reinforced: supported for d <= 3");

    const double alpha_total = w.total();
    std::vector<double> probs(static_cast<std::size_t>(degree));
    for (std::int64_t n = 0; n < steps; ++n) {
        auto& local = counts[pack(out.displacement)];
        if (local.empty()) local.assign(static_cast<std::size_t>(degree), 0);
        double total = alpha_total;
        for (auto c : local) total += static_cast<double>(c);
        for (int i = 0; i < degree; ++i)
            probs[static_cast<std::size_t>(i)] =
                (w.alpha[static_cast<std::size_t>(i)] + static_cast<double>(local[static_cast<std::size_t>(i)])) / total;
        const int dir = detail::sample_direction(probs, rng);
        ++local[static_cast<std::size_t>(dir)];
        if (record_directions) out.step_directions.push_back(dir);
        detail::apply_step(out.displacement, dir, d);
        if (n + 1 < steps) range.insert(out.displacement);
    }
    out.range = range.size();
    return out;
}

//! Probability of a fixed finite path from the origin under the averaged law,
//! computed as the Dirichlet moment of the path's crossing numbers.
inline double annealed_path_probability(const Weights& w, std::span<const int> step_dirs) {
    w.validate();
    const int d = w.d;
    const int degree = 2 * d;
    std::unordered_map<std::uint64_t, std::vector<double>> crossings;
    std::vector<long long> x(static_cast<std::size_t>(d), 0);
    auto pack = [&](const std::vector<long long>& v) {
        std::uint64_t key = 0;
        for (int i = 0; i < d; ++i)
            key = (key << 21) | static_cast<std::uint64_t>(v[static_cast<std::size_t>(i)] + (1LL << 20));
        return key;
    };
    for (int dir : step_dirs) {
        if (dir < 0 || dir >= degree) throw std::invalid_argument("annealed_path_probability: bad direction");
        auto& local = crossings[pack(x)];
        if (local.empty()) local.assign(static_cast<std::size_t>(degree), 0.0);
        local[static_cast<std::size_t>(dir)] += 1.0;
        detail::apply_step(x, dir, d);
    }
    std::vector<std::vector<double>> lambdas;
    lambdas.reserve(crossings.size());
    for (auto& [key, local] : crossings) lambdas.push_back(local);
    return std::exp(log_dirichlet_moment(w, lambdas));
}

//! Same probability evaluated sequentially through the reinforced-walk
//! representation: a telescoping product of linear-reinforcement odds. Exact
//! same value as the moment formula up to floating-point rounding.
inline double annealed_path_probability_sequential(const Weights& w, std::span<const int> step_dirs) {
    w.validate();
    const int d = w.d;
    const int degree = 2 * d;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> counts;
    std::vector<long long> x(static_cast<std::size_t>(d), 0);
    auto pack = [&](const std::vector<long long>& v) {
        std::uint64_t key = 0;
        for (int i = 0; i < d; ++i)
            key = (key << 21) | static_cast<std::uint64_t>(v[static_cast<std::size_t>(i)] + (1LL << 20));
        return key;
    };
    const double alpha_total = w.total();
    double log_prob = 0.0;
    for (int dir : step_dirs) {
        if (dir < 0 || dir >= degree) throw std::invalid_argument("bad direction");
        auto& local = counts[pack(x)];
        if (local.empty()) local.assign(static_cast<std::size_t>(degree), 0);
        double total = alpha_total;
        for (auto c : local) total += static_cast<double>(c);
        log_prob += std::log((w.alpha[static_cast<std::size_t>(dir)] +
                              static_cast<double>(local[static_cast<std::size_t>(dir)])) /
                             total);
        ++local[static_cast<std::size_t>(dir)];
        detail::apply_step(x, dir, d);
    }
    return std::exp(log_prob);
}

struct AnnealedConsistency {
    int max_length = 0;
    double max_relative_error = 0.0;        // moment formula vs sequential product
    std::vector<double> probability_sums;   // sum over all paths of each length
    std::size_t paths_checked = 0;
};

//! Enumerate every nearest-neighbor path from the origin up to the given
//! length, evaluate its probability under the averaged law both ways (the
//! closed-form moment and the step-by-step reinforced product) and accumulate
//! the worst relative discrepancy plus the total probability per length
//! (which must be 1 for each length).
inline AnnealedConsistency annealed_consistency_check(const Weights& w, int max_length) {
    w.validate();
    if (max_length < 1 || max_length > 8)
        throw std::invalid_argument("annealed_consistency_check: length must be in [1, 8]");
    const int degree = 2 * w.d;
    AnnealedConsistency out;
    out.max_length = max_length;
    out.probability_sums.assign(static_cast<std::size_t>(max_length), 0.0);
    for (int len = 1; len <= max_length; ++len) {
        std::vector<int> dirs(static_cast<std::size_t>(len), 0);
        for (;;) {
            const double direct = annealed_path_probability(w, dirs);
            const double sequential = annealed_path_probability_sequential(w, dirs);
            const double rel = std::abs(direct - sequential) / std::max(direct, sequential);
            out.max_relative_error = std::max(out.max_relative_error, rel);
            out.probability_sums[static_cast<std::size_t>(len - 1)] += direct;
            ++out.paths_checked;
            int pos = 0;
            for (; pos < len; ++pos) {
                if (++dirs[static_cast<std::size_t>(pos)] < degree) break;
                dirs[static_cast<std::size_t>(pos)] = 0;
            }
            if (pos == len) break;
        }
    }
    return out;
}

//! Expected number of visits to the origin before leaving {0, e}, for a walk
//! started at the origin, when a = omega(0, e) and b = omega(e, 0):
//! the geometric series 1 / (1 - a b).
inline double trap_green_function(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(a < 1.0) || !(b < 1.0))
        throw std::invalid_argument("trap_green_function: probabilities must lie in (0,1)");
    return 1.0 / (1.0 - a * b);
}

//! Expected exit time of {0, e} started at the origin: (1 + a) / (1 - a b).
inline double trap_exit_time(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0) || !(a < 1.0) || !(b < 1.0))
        throw std::invalid_argument("trap_exit_time: probabilities must lie in (0,1)");
    return (1.0 + a) / (1.0 - a * b);
}

struct TrapTailReport {
    std::size_t samples = 0;
    double kappa_theory = 0.0;
    TailIndexReport hill;
    double relative_error = 0.0;
    bool out_of_regime = false;     // estimate outside the range where the tail
                                    // asymptotics can be read off at this sample size
    std::string note;
};

//! Sample the trap Green function G = 1/(1 - a b) where a, b are the two
//! opposing exit probabilities across the most-favored edge in independent
//! Dirichlet environments, and estimate the tail index of G by the Hill
//! estimator. The tail index equals kappa.
//!
//! Numerical care: 1 - a b computed as (1 - a) + a (1 - b), with both
//! complements taken from gamma sums directly, so heavy-tailed G values do not
//! lose precision to cancellation.
inline TrapTailReport trap_tail_experiment(const Weights& w, std::size_t samples, Rng& rng,
                                           std::size_t hill_k = 0) {
    w.validate();
    const int i0 = trap_direction(w);
    const int degree = 2 * w.d;
    const int i0_rev = opposite_direction(i0, w.d);

    std::vector<double> greens(samples);
    std::vector<double> gam(static_cast<std::size_t>(degree));
    for (std::size_t s = 0; s < samples; ++s) {
        // site 0: a = gam[i0]/sum, 1 - a = (sum - gam[i0])/sum
        double sum0 = 0.0;
        for (int i = 0; i < degree; ++i) {
            gam[static_cast<std::size_t>(i)] = rng.gamma(w.alpha[static_cast<std::size_t>(i)]);
            sum0 += gam[static_cast<std::size_t>(i)];
        }
        const double a = gam[static_cast<std::size_t>(i0)] / sum0;
        const double one_minus_a = (sum0 - gam[static_cast<std::size_t>(i0)]) / sum0;
        // site e_{i0}: b is the probability of stepping back, direction i0 + d
        double sum1 = 0.0;
        for (int i = 0; i < degree; ++i) {
            gam[static_cast<std::size_t>(i)] = rng.gamma(w.alpha[static_cast<std::size_t>(i)]);
            sum1 += gam[static_cast<std::size_t>(i)];
        }
        const double b = gam[static_cast<std::size_t>(i0_rev)] / sum1;
        const double one_minus_b = (sum1 - gam[static_cast<std::size_t>(i0_rev)]) / sum1;
        const double denom = one_minus_a + a * one_minus_b;
        if (!(denom > 0.0)) throw numerical_error("trap_tail_experiment: degenerate trap denominator");
        greens[s] = 1.0 / denom;
    }

    TrapTailReport report;
    report.samples = samples;
    report.kappa_theory = kappa(w);
    report.hill = hill_estimator(std::move(greens), hill_k);
    report.relative_error = std::abs(report.hill.estimate - report.kappa_theory) /
                            std::max(1e-300, report.kappa_theory);
    if (report.hill.estimate > 4.0) {
        report.out_of_regime = true;
        report.note = "tail index above 4: tail too light to resolve at this sample size";
    }
    return report;
}

}  // namespace rwde
