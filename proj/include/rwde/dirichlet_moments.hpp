#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "rwde/torus.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! Log of E[prod_e omega(e)^lambda_e] for one Dirichlet site with exponent
//! vector lambda (length 2d). Evaluated with log-Gamma throughout, so deep
//! negative exponents close to the integrability boundary stay finite.
inline double log_site_moment(const Weights& w, std::span<const double> lambda) {
    if (lambda.size() != w.alpha.size())
        throw std::invalid_argument("site moment: lambda must have 2*d entries");
    const double a0 = w.total();
    double lambda_sum = 0.0;
    double acc = 0.0;
    for (std::size_t j = 0; j < lambda.size(); ++j) {
        const double shifted = w.alpha[j] + lambda[j];
        if (!(shifted > 0.0))
            throw std::domain_error("site moment: integrability violated (alpha + lambda <= 0)");
        lambda_sum += lambda[j];
        acc += std::lgamma(shifted) - std::lgamma(w.alpha[j]);
    }
    return acc + std::lgamma(a0) - std::lgamma(a0 + lambda_sum);
}

//! Log-moment over independent sites: sites carry their own exponent vectors.
inline double log_dirichlet_moment(const Weights& w, const std::vector<std::vector<double>>& site_lambdas) {
    double acc = 0.0;
    for (const auto& lam : site_lambdas) acc += log_site_moment(w, lam);
    return acc;
}

//! E[prod_e omega(e)^lambda_e] for a torus edge field of exponents under the
//! i.i.d. Dirichlet law. Zero rows contribute factor 1 and are skipped.
inline double log_dirichlet_path_moment(const Weights& w, const EdgeField& lambda) {
    const TorusGraph& g = lambda.graph;
    if (g.d != w.d) throw std::invalid_argument("path moment: dimension mismatch");
    const std::int64_t n = g.vertex_count();
    const int deg = g.degree();
    double acc = 0.0;
    std::vector<double> row(static_cast<std::size_t>(deg));
    for (Vertex v = 0; v < n; ++v) {
        bool nonzero = false;
        for (int dir = 0; dir < deg; ++dir) {
            row[static_cast<std::size_t>(dir)] = lambda[g.edge_index(v, dir)];
            nonzero = nonzero || row[static_cast<std::size_t>(dir)] != 0.0;
        }
        if (nonzero) acc += log_site_moment(w, row);
    }
    return acc;
}

inline double dirichlet_path_moment(const Weights& w, const EdgeField& lambda) {
    return std::exp(log_dirichlet_path_moment(w, lambda));
}

}  // namespace rwde
