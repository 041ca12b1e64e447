#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace rwde {

//! SplitMix64 step (Steele, Lea & Flood reference constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

//! xoshiro256++ (Blackman & Vigna reference implementation), seeded via SplitMix64.
//! Streams are derived from (master seed, stream index) so replica k is reproducible
//! no matter which thread runs it.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    static Rng stream(std::uint64_t master_seed, std::uint64_t stream_index) {
        // Weyl-sequence offset keeps distinct streams decorrelated even for
        // adjacent indices; the +1 keeps stream 0 distinct from the master seed.
        return Rng(master_seed ^ splitmix64_once((stream_index + 1) * 0x9E3779B97F4A7C15ULL));
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    //! Uniform double in [0,1) with 53 random bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    //! Uniform double in (0,1); rejects exact zeros so logs are safe.
    double uniform_pos() {
        double u = uniform();
        while (u <= 0.0) u = uniform();
        return u;
    }

    //! Uniform integer in [0, n).
    std::uint64_t uniform_below(std::uint64_t n) {
        // Lemire-style rejection keeps the draw exactly uniform.
        std::uint64_t x = next_u64();
        __uint128_t m = static_cast<__uint128_t>(x) * n;
        auto lo = static_cast<std::uint64_t>(m);
        if (lo < n) {
            const std::uint64_t threshold = (0 - n) % n;
            while (lo < threshold) {
                x = next_u64();
                m = static_cast<__uint128_t>(x) * n;
                lo = static_cast<std::uint64_t>(m);
            }
        }
        return static_cast<std::uint64_t>(m >> 64);
    }

    //! Standard normal via the Marsaglia polar method (no state carried over).
    double normal() {
        for (;;) {
            const double u = 2.0 * uniform() - 1.0;
            const double v = 2.0 * uniform() - 1.0;
            const double s = u * u + v * v;
            if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
        }
    }

    //! Gamma(shape, 1) via Marsaglia–Tsang squeeze; shapes below 1 use the
    //! G(a) = G(a+1) * U^(1/a) boost, so all positive shapes are valid.
    double gamma(double shape) {
        if (!(shape > 0.0)) throw std::invalid_argument("gamma: shape must be positive");
        if (shape < 1.0) {
            const double boost = std::pow(uniform_pos(), 1.0 / shape);
            return gamma(shape + 1.0) * boost;
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x;
            double v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform_pos();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    double beta(double a, double b) {
        const double x = positive_gamma(a);
        const double y = positive_gamma(b);
        return x / (x + y);
    }

    //! Dirichlet draw: i.i.d. Gammas normalized to sum 1. Zero/non-finite Gamma
    //! draws (possible underflow at tiny shapes) are resampled.
    void dirichlet(std::span<const double> alpha, std::span<double> out) {
        if (alpha.size() != out.size()) throw std::invalid_argument("dirichlet: size mismatch");
        double total = 0.0;
        for (std::size_t i = 0; i < alpha.size(); ++i) {
            out[i] = positive_gamma(alpha[i]);
            total += out[i];
        }
        for (auto& x : out) x /= total;
    }

    std::vector<double> dirichlet(std::span<const double> alpha) {
        std::vector<double> out(alpha.size());
        dirichlet(alpha, out);
        return out;
    }

  private:
    static std::uint64_t splitmix64_once(std::uint64_t x) {
        return splitmix64(x);
    }
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    double positive_gamma(double shape) {
        double g = gamma(shape);
        while (!(g > 0.0) || !std::isfinite(g)) g = gamma(shape);
        return g;
    }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace rwde
