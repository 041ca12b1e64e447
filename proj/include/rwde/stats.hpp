#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rwde/rng.hpp"
#include "rwde/special_functions.hpp"

namespace rwde {

struct GoodnessOfFit {
    std::size_t n = 0;
    double statistic = 0.0;
    double p_value = 0.0;
    std::string null_description;
};

struct TailIndexReport {
    std::size_t n = 0;
    std::size_t k = 0;
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::vector<std::pair<std::size_t, double>> sensitivity;  // (k, estimate)
};

inline std::size_t default_hill_k(std::size_t n) {
    return static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(n), 0.6)));
}

namespace detail {

inline double hill_point(const std::vector<double>& sorted_desc, std::size_t k) {
    const double pivot = sorted_desc[k];  // X_(k+1)
    double acc = 0.0;
    for (std::size_t j = 0; j < k; ++j) acc += std::log(sorted_desc[j] / pivot);
    if (!(acc > 0.0)) throw std::domain_error("hill estimator: degenerate tail (no spread above pivot)");
    return static_cast<double>(k) / acc;
}

}  // namespace detail

//! Hill tail-index estimator from the top k order statistics (k+1 used as pivot).
//! k = 0 selects the default n^0.6. The report carries a k-sensitivity sweep and
//! a normal-approximation confidence interval.
inline TailIndexReport hill_estimator(std::vector<double> samples, std::size_t k = 0) {
    const std::size_t n = samples.size();
    if (n < 100) throw std::invalid_argument("hill estimator: need at least 100 samples");
    for (double x : samples)
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument("hill estimator: samples must be positive and finite");
    if (k == 0) k = default_hill_k(n);
    if (k < 10 || k + 1 > n) throw std::invalid_argument("hill estimator: k out of range");

    std::sort(samples.begin(), samples.end(), std::greater<double>());
    TailIndexReport report;
    report.n = n;
    report.k = k;
    report.estimate = detail::hill_point(samples, k);
    const double half_width = 1.959963984540054 * report.estimate / std::sqrt(static_cast<double>(k));
    report.ci_low = report.estimate - half_width;
    report.ci_high = report.estimate + half_width;

    for (double factor : {0.25, 0.5, 1.0, 2.0, 4.0}) {
        auto kk = static_cast<std::size_t>(std::llround(factor * static_cast<double>(k)));
        kk = std::min(kk, n - 1);
        kk = std::max<std::size_t>(kk, 10);
        if (!report.sensitivity.empty() && report.sensitivity.back().first == kk) continue;
        report.sensitivity.emplace_back(kk, detail::hill_point(samples, kk));
    }
    return report;
}

//! Two-sided Kolmogorov-Smirnov test against Beta(a,b). The p-value uses the
//! asymptotic Kolmogorov law, which is only trustworthy for large samples, so
//! smaller inputs are rejected instead of silently misreported.
inline GoodnessOfFit ks_test_beta(std::vector<double> samples, double a, double b) {
    const std::size_t n = samples.size();
    if (n < 1000)
        throw std::invalid_argument("ks test: asymptotic p-value needs at least 1000 samples");
    for (double x : samples)
        if (!(x >= 0.0) || !(x <= 1.0))
            throw std::invalid_argument("ks test: samples must lie in [0,1]");
    std::sort(samples.begin(), samples.end());
    if (samples.front() == samples.back())
        throw std::invalid_argument("ks test: degenerate sample (all values equal)");

    double d_stat = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = beta_cdf(a, b, samples[i]);
        const double upper = static_cast<double>(i + 1) / static_cast<double>(n) - cdf;
        const double lower = cdf - static_cast<double>(i) / static_cast<double>(n);
        d_stat = std::max({d_stat, upper, lower});
    }
    const double sqrt_n = std::sqrt(static_cast<double>(n));
    const double lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d_stat;
    GoodnessOfFit out;
    out.n = n;
    out.statistic = d_stat;
    out.p_value = kolmogorov_sf(lambda);
    out.null_description = "Beta(" + std::to_string(a) + "," + std::to_string(b) + ")";
    return out;
}

//! Pearson chi-square goodness of fit for categorical counts.
inline GoodnessOfFit chi_square_test(std::span<const std::uint64_t> counts,
                                     std::span<const double> expected_probs) {
    if (counts.size() != expected_probs.size() || counts.size() < 2)
        throw std::invalid_argument("chi-square: need matching categories (>= 2)");
    std::uint64_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw std::invalid_argument("chi-square: empty sample");
    double stat = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        const double expected = expected_probs[i] * static_cast<double>(total);
        if (!(expected > 0.0)) throw std::invalid_argument("chi-square: expected count must be positive");
        const double delta = static_cast<double>(counts[i]) - expected;
        stat += delta * delta / expected;
    }
    GoodnessOfFit out;
    out.n = static_cast<std::size_t>(total);
    out.statistic = stat;
    out.p_value = chi_square_sf(stat, static_cast<int>(counts.size()) - 1);
    out.null_description = "categorical";
    return out;
}

struct BootstrapInterval {
    double estimate = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t resamples = 0;
    double level = 0.0;
};

//! Percentile bootstrap for an arbitrary statistic of an i.i.d. sample.
inline BootstrapInterval bootstrap_ci(std::span<const double> samples,
                                      const std::function<double(std::span<const double>)>& statistic,
                                      std::size_t resamples, Rng& rng, double level = 0.95) {
    if (samples.empty()) throw std::invalid_argument("bootstrap: empty sample");
    if (resamples < 200) throw std::invalid_argument("bootstrap: need at least 200 resamples");
    if (!(level > 0.0) || !(level < 1.0)) throw std::invalid_argument("bootstrap: level in (0,1)");

    BootstrapInterval out;
    out.estimate = statistic(samples);
    out.resamples = resamples;
    out.level = level;

    std::vector<double> scratch(samples.size());
    std::vector<double> stats(resamples);
    for (std::size_t r = 0; r < resamples; ++r) {
        for (auto& x : scratch)
            x = samples[static_cast<std::size_t>(rng.uniform_below(samples.size()))];
        stats[r] = statistic(scratch);
    }
    std::sort(stats.begin(), stats.end());
    const double tail = (1.0 - level) / 2.0;
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double frac = pos - static_cast<double>(i);
        if (i + 1 >= resamples) return stats.back();
        return stats[i] * (1.0 - frac) + stats[i + 1] * frac;
    };
    out.ci_low = quantile(tail);
    out.ci_high = quantile(1.0 - tail);
    return out;
}

inline double mean_of(std::span<const double> xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

}  // namespace rwde
