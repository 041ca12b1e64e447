#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rwde {

//! Direction convention used everywhere: directions 0..d-1 are +e_1..+e_d and
//! direction j+d is the opposite of direction j.
inline int opposite_direction(int dir, int d) { return dir < d ? dir + d : dir - d; }

//! Dirichlet weight vector: one positive weight per signed lattice direction.
struct Weights {
    int d = 0;
    std::vector<double> alpha;  // size 2d

    Weights() = default;
    Weights(int dim, std::vector<double> a) : d(dim), alpha(std::move(a)) { validate(); }

    static Weights uniform(int dim, double value) {
        return Weights(dim, std::vector<double>(2 * static_cast<std::size_t>(dim), value));
    }

    void validate() const {
        if (d < 1) throw std::invalid_argument("weights: dimension must be >= 1");
        if (alpha.size() != 2 * static_cast<std::size_t>(d))
            throw std::invalid_argument("weights: alpha must have 2*d entries");
        for (double a : alpha)
            if (!(a > 0.0)) throw std::invalid_argument("weights: all entries must be positive");
    }

    double total() const {
        double s = 0.0;
        for (double a : alpha) s += a;
        return s;
    }
};

//! Trap-strength exponent: twice the total weight minus the largest opposite-pair sum.
inline double kappa(const Weights& w) {
    w.validate();
    double best = 0.0;
    for (int i = 0; i < w.d; ++i) best = std::max(best, w.alpha[i] + w.alpha[i + w.d]);
    return 2.0 * w.total() - best;
}

//! Axis of the strongest two-site trap; ties resolved toward the smallest index.
inline int trap_direction(const Weights& w) {
    w.validate();
    int arg = 0;
    double best = w.alpha[0] + w.alpha[w.d];
    for (int i = 1; i < w.d; ++i) {
        const double pair = w.alpha[i] + w.alpha[i + w.d];
        if (pair > best) {
            best = pair;
            arg = i;
        }
    }
    return arg;
}

//! Normalized one-step mean displacement; component i is (alpha_i - alpha_{i+d}) / alpha_0.
inline std::vector<double> mean_drift(const Weights& w) {
    w.validate();
    const double a0 = w.total();
    std::vector<double> drift(static_cast<std::size_t>(w.d));
    for (int i = 0; i < w.d; ++i) drift[i] = (w.alpha[i] - w.alpha[i + w.d]) / a0;
    return drift;
}

inline bool drift_is_zero(const Weights& w, double tol = 0.0) {
    for (double v : mean_drift(w))
        if (std::abs(v) > tol) return false;
    return true;
}

//! Weights of the time-reversed environment law: swap each direction with its opposite.
inline Weights reversed_weights(const Weights& w) {
    w.validate();
    std::vector<double> a(w.alpha.size());
    for (int j = 0; j < 2 * w.d; ++j) a[j] = w.alpha[opposite_direction(j, w.d)];
    return Weights(w.d, std::move(a));
}

//! Homogeneous capacities plus one boosted edge out of the origin. Represents
//! the capacity field used for the min-cut lower bound: every edge carries its
//! directional weight, except (0, e_i) which carries alpha_i + kappa. A global
//! scale supports rescaled instances.
struct BoostedCapacity {
    Weights w;
    int boost_dir = -1;   // -1 means no boost (plain homogeneous capacities)
    double boost = 0.0;   // extra capacity on the edge (origin, boost_dir)
    double scale = 1.0;

    //! Capacity of the edge with the given tail (lattice coordinates) and direction.
    double at(std::span<const long long> x, int dir) const {
        double c = w.alpha[static_cast<std::size_t>(dir)];
        if (dir == boost_dir) {
            bool origin = true;
            for (long long c0 : x)
                if (c0 != 0) { origin = false; break; }
            if (origin) c += boost;
        }
        return scale * c;
    }
};

//! Capacity assignment alpha^(i): directional weights with kappa added on (0, e_i).
inline BoostedCapacity boosted_weights(const Weights& w, int i) {
    w.validate();
    if (i < 0 || i >= 2 * w.d) throw std::invalid_argument("boosted_weights: direction out of range");
    return BoostedCapacity{w, i, kappa(w), 1.0};
}

enum class Regime { zero_speed, ballistic, symmetric_recurrent_behavior };

inline Regime predicted_regime(const Weights& w) {
    if (kappa(w) <= 1.0) return Regime::zero_speed;
    return drift_is_zero(w) ? Regime::symmetric_recurrent_behavior : Regime::ballistic;
}

inline std::string regime_name(Regime r) {
    switch (r) {
        case Regime::zero_speed: return "zero-speed";
        case Regime::ballistic: return "ballistic";
        case Regime::symmetric_recurrent_behavior: return "symmetric-recurrent-behavior";
    }
    return "unknown";
}

}  // namespace rwde
