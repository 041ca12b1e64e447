#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwde/environment.hpp"
#include "rwde/errors.hpp"
#include "rwde/rng.hpp"
#include "rwde/stationary.hpp"
#include "rwde/stats.hpp"
#include "rwde/torus.hpp"
#include "rwde/walk.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! Monte Carlo estimate of E[f_N^p], where f_N is the origin density of the
//! stationary law of the walk on the N-torus: f_N = N^d pi_N(0).
struct MomentEstimate {
    int N = 0;
    double p = 0.0;
    std::size_t replicas = 0;
    std::size_t solver_failures = 0;
    double mean = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double mean_density = 0.0;  // plain E[f_N] estimate alongside, for reference
    std::uint64_t seed = 0;
    // per-replica rows, kept only on request (for CSV artifacts)
    std::vector<std::uint64_t> replica_streams;
    std::vector<double> replica_density;
    std::vector<double> replica_residual;
};

struct MomentOptions {
    double p = 2.0;
    std::size_t replicas = 2000;
    std::size_t bootstrap_resamples = 1000;
    StationaryOptions stationary;
    bool keep_replica_values = false;  // retain per-replica densities for CSV dumps
};

//! Replica r of torus-size index n_index draws its environment from stream
//! n_index * replicas + r of the master seed, so every (N, r) cell is
//! reproducible independently of evaluation order or the set of sizes run.
inline MomentEstimate moment_experiment(const Weights& w, int N, std::size_t size_index,
                                        std::uint64_t seed, const MomentOptions& opts = {}) {
    w.validate();
    const TorusGraph g{w.d, N};
    std::vector<double> values;
    values.reserve(opts.replicas);
    std::size_t failures = 0;
    double density_sum = 0.0;
    MomentEstimate est;
    for (std::size_t r = 0; r < opts.replicas; ++r) {
        const std::uint64_t stream = static_cast<std::uint64_t>(size_index) * opts.replicas + r;
        Rng rng = Rng::stream(seed, stream);
        const Environment env = sample_environment(w, g, rng);
        try {
            const StationarySolution sol = stationary_distribution(env, opts.stationary);
            const double f = density_f(sol);
            values.push_back(std::pow(f, opts.p));
            density_sum += f;
            if (opts.keep_replica_values) {
                est.replica_streams.push_back(stream);
                est.replica_density.push_back(f);
                est.replica_residual.push_back(sol.residual);
            }
        } catch (const numerical_error&) {
            ++failures;
        }
    }
    if (values.empty()) throw numerical_error("moment_experiment: all replicas failed");

    est.N = N;
    est.p = opts.p;
    est.replicas = opts.replicas;
    est.solver_failures = failures;
    est.seed = seed;
    est.mean = mean_of(values);
    est.mean_density = density_sum / static_cast<double>(values.size());
    Rng boot = Rng::stream(seed, (std::uint64_t{1} << 40) + size_index);
    const BootstrapInterval ci =
        bootstrap_ci(values, [](std::span<const double> v) { return mean_of(v); },
                     opts.bootstrap_resamples, boot);
    est.ci_low = ci.ci_low;
    est.ci_high = ci.ci_high;
    return est;
}

//! Distributional check of the time-reversed environment at the origin.
//! Under weights alpha, the reversed exit probability in direction j of the
//! stationary environment is Beta(alpha'_j, alpha_0 - alpha'_j) where alpha'
//! swaps each direction with its opposite and alpha_0 is the total weight.
struct ReversalLawReport {
    int direction = -1;
    double beta_a = 0.0;
    double beta_b = 0.0;
    GoodnessOfFit reversed_fit;   // reversed marginal against the swapped law
    GoodnessOfFit wrong_null;     // same sample against the unswapped law
};

struct ReversalLawOptions {
    std::size_t replicas = 10000;
    StationaryOptions stationary;
};

inline std::vector<ReversalLawReport> reversal_law_test(const Weights& w, int N, std::uint64_t seed,
                                                        const ReversalLawOptions& opts = {}) {
    w.validate();
    const TorusGraph g{w.d, N};
    const Weights swapped = reversed_weights(w);
    const int degree = 2 * w.d;
    const double alpha_total = w.total();

    std::vector<std::vector<double>> samples(static_cast<std::size_t>(degree));
    for (auto& s : samples) s.reserve(opts.replicas);
    for (std::size_t r = 0; r < opts.replicas; ++r) {
        Rng rng = Rng::stream(seed, r);
        const Environment env = sample_environment(w, g, rng);
        const StationarySolution sol = stationary_distribution(env, opts.stationary);
        const TimeReversal rev = time_reverse(env, sol);
        for (int dir = 0; dir < degree; ++dir)
            samples[static_cast<std::size_t>(dir)].push_back(rev.env.at(0, dir));
    }

    std::vector<ReversalLawReport> reports;
    reports.reserve(static_cast<std::size_t>(degree));
    for (int dir = 0; dir < degree; ++dir) {
        ReversalLawReport rep;
        rep.direction = dir;
        rep.beta_a = swapped.alpha[static_cast<std::size_t>(dir)];
        rep.beta_b = alpha_total - rep.beta_a;
        rep.reversed_fit = ks_test_beta(samples[static_cast<std::size_t>(dir)], rep.beta_a, rep.beta_b);
        const double wrong_a = w.alpha[static_cast<std::size_t>(dir)];
        rep.wrong_null = ks_test_beta(samples[static_cast<std::size_t>(dir)], wrong_a, alpha_total - wrong_a);
        reports.push_back(std::move(rep));
    }
    return reports;
}

//! Long-run behavior of the walk itself: velocity estimate with a bootstrap
//! interval per axis, plus the fraction of distinct sites visited.
struct RegimeReport {
    Weights weights;
    Regime predicted = Regime::symmetric_recurrent_behavior;
    std::int64_t steps = 0;
    std::size_t replicas = 0;
    std::vector<double> velocity;            // mean displacement / steps, per axis
    std::vector<double> velocity_ci_low;
    std::vector<double> velocity_ci_high;
    std::vector<double> velocity_checkpoint; // same estimate at the checkpoint step
    std::vector<double> drift_direction;     // theoretical d_alpha for reference
    std::vector<int> sign_agreement;         // per axis: 1 agree, -1 disagree, 0 not applicable
    double range_fraction = 0.0;             // mean R_n / n
    double range_fraction_ci_low = 0.0;
    double range_fraction_ci_high = 0.0;
    double range_fraction_checkpoint = 0.0;
    double checkpoint_speed = 0.0;           // |mean displacement| / n at the checkpoint
    double final_speed = 0.0;                // |mean displacement| / n at the end
    std::int64_t checkpoint_step = 0;
};

struct RegimeOptions {
    std::int64_t steps = 100000;
    std::size_t replicas = 100;
    int environment_size = 64;               // torus side used as a finite window
    std::int64_t checkpoint_step = 0;        // 0 selects steps / 10
    std::size_t bootstrap_resamples = 1000;
    StationaryOptions stationary;
};

inline RegimeReport regime_experiment(const Weights& w, std::uint64_t seed, const RegimeOptions& opts = {}) {
    w.validate();
    if (opts.steps <= 0) throw std::invalid_argument("regime_experiment: steps must be positive");
    if (opts.replicas == 0) throw std::invalid_argument("regime_experiment: need replicas");
    const TorusGraph g{w.d, opts.environment_size};
    const std::int64_t checkpoint = opts.checkpoint_step > 0 ? opts.checkpoint_step : opts.steps / 10;
    const std::array<std::int64_t, 1> marks{checkpoint};

    RegimeReport rep;
    rep.weights = w;
    rep.predicted = predicted_regime(w);
    rep.steps = opts.steps;
    rep.replicas = opts.replicas;
    rep.drift_direction = mean_drift(w);
    rep.checkpoint_step = checkpoint;

    std::vector<std::vector<double>> per_axis(static_cast<std::size_t>(w.d));
    for (auto& v : per_axis) v.reserve(opts.replicas);
    std::vector<double> fractions;
    fractions.reserve(opts.replicas);
    std::vector<double> mid_disp(static_cast<std::size_t>(w.d), 0.0);
    std::vector<double> end_disp(static_cast<std::size_t>(w.d), 0.0);
    double mid_fraction_sum = 0.0;

    for (std::size_t r = 0; r < opts.replicas; ++r) {
        Rng env_rng = Rng::stream(seed, 2 * r);
        Rng walk_rng = Rng::stream(seed, 2 * r + 1);
        const Environment env = sample_environment(w, g, env_rng);
        const Trajectory traj = simulate_quenched(env, 0, opts.steps, walk_rng, marks);
        for (int i = 0; i < w.d; ++i) {
            const double c = static_cast<double>(traj.displacement[static_cast<std::size_t>(i)]);
            per_axis[static_cast<std::size_t>(i)].push_back(c / static_cast<double>(opts.steps));
            end_disp[static_cast<std::size_t>(i)] += c;
            mid_disp[static_cast<std::size_t>(i)] +=
                static_cast<double>(traj.checkpoints.at(0)[static_cast<std::size_t>(i)]);
        }
        fractions.push_back(static_cast<double>(traj.range) / static_cast<double>(opts.steps));
        mid_fraction_sum +=
            static_cast<double>(traj.checkpoint_ranges.at(0)) / static_cast<double>(checkpoint);
    }

    const auto mean_fn = [](std::span<const double> v) { return mean_of(v); };
    for (int i = 0; i < w.d; ++i) {
        auto& v = per_axis[static_cast<std::size_t>(i)];
        rep.velocity.push_back(mean_of(v));
        Rng boot = Rng::stream(seed, (std::uint64_t{1} << 41) + static_cast<std::uint64_t>(i));
        const BootstrapInterval ci = bootstrap_ci(v, mean_fn, opts.bootstrap_resamples, boot);
        rep.velocity_ci_low.push_back(ci.ci_low);
        rep.velocity_ci_high.push_back(ci.ci_high);
    }
    rep.range_fraction = mean_of(fractions);
    {
        Rng boot = Rng::stream(seed, (std::uint64_t{1} << 41) + static_cast<std::uint64_t>(w.d));
        const BootstrapInterval ci = bootstrap_ci(fractions, mean_fn, opts.bootstrap_resamples, boot);
        rep.range_fraction_ci_low = ci.ci_low;
        rep.range_fraction_ci_high = ci.ci_high;
    }
    double mid_norm = 0.0, end_norm = 0.0;
    const double n_rep = static_cast<double>(opts.replicas);
    for (int i = 0; i < w.d; ++i) {
        const double m = mid_disp[static_cast<std::size_t>(i)] / n_rep;
        const double e = end_disp[static_cast<std::size_t>(i)] / n_rep;
        rep.velocity_checkpoint.push_back(m / static_cast<double>(checkpoint));
        mid_norm += m * m;
        end_norm += e * e;
    }
    rep.checkpoint_speed = std::sqrt(mid_norm) / static_cast<double>(checkpoint);
    rep.final_speed = std::sqrt(end_norm) / static_cast<double>(opts.steps);
    rep.range_fraction_checkpoint = mid_fraction_sum / n_rep;
    for (int i = 0; i < w.d; ++i) {
        const double drift = rep.drift_direction[static_cast<std::size_t>(i)];
        const double v = rep.velocity[static_cast<std::size_t>(i)];
        rep.sign_agreement.push_back(drift == 0.0 ? 0 : (drift * v > 0.0 ? 1 : -1));
    }
    return rep;
}

struct RangeFractionPoint {
    std::int64_t steps = 0;
    double fraction = 0.0;   // mean R_n / n
    double ci_low = 0.0;
    double ci_high = 0.0;
};

//! R_n / n at several walk lengths, sharing one trajectory per replica
//! (checkpointed), so the points are comparable path by path.
inline std::vector<RangeFractionPoint> range_fraction_experiment(const Weights& w, std::uint64_t seed,
                                                                 std::vector<std::int64_t> steps_list,
                                                                 const RegimeOptions& opts = {}) {
    w.validate();
    if (steps_list.empty()) throw std::invalid_argument("range_fraction_experiment: empty steps list");
    std::sort(steps_list.begin(), steps_list.end());
    if (steps_list.front() < 1) throw std::invalid_argument("range_fraction_experiment: steps must be >= 1");
    if (opts.replicas == 0) throw std::invalid_argument("range_fraction_experiment: need replicas");
    const TorusGraph g{w.d, opts.environment_size};
    const std::int64_t horizon = steps_list.back();

    std::vector<std::vector<double>> fractions(steps_list.size());
    for (auto& f : fractions) f.reserve(opts.replicas);
    for (std::size_t r = 0; r < opts.replicas; ++r) {
        Rng env_rng = Rng::stream(seed, 2 * r);
        Rng walk_rng = Rng::stream(seed, 2 * r + 1);
        const Environment env = sample_environment(w, g, env_rng);
        const Trajectory traj = simulate_quenched(env, 0, horizon, walk_rng, steps_list);
        for (std::size_t i = 0; i < steps_list.size(); ++i)
            fractions[i].push_back(static_cast<double>(traj.checkpoint_ranges.at(i)) /
                                   static_cast<double>(steps_list[i]));
    }

    std::vector<RangeFractionPoint> points;
    points.reserve(steps_list.size());
    const auto mean_fn = [](std::span<const double> v) { return mean_of(v); };
    for (std::size_t i = 0; i < steps_list.size(); ++i) {
        RangeFractionPoint pt;
        pt.steps = steps_list[i];
        pt.fraction = mean_of(fractions[i]);
        Rng boot = Rng::stream(seed, (std::uint64_t{1} << 41) + 100 + i);
        const BootstrapInterval ci = bootstrap_ci(fractions[i], mean_fn, opts.bootstrap_resamples, boot);
        pt.ci_low = ci.ci_low;
        pt.ci_high = ci.ci_high;
        points.push_back(pt);
    }
    return points;
}

}  // namespace rwde
