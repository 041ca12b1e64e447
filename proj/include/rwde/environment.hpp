#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rwde/rng.hpp"
#include "rwde/torus.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! A quenched environment: one exit-probability vector per torus vertex.
//! Invariants: every probability is in (0,1] and every row sums to 1
//! within 1e-12.
struct Environment {
    TorusGraph graph;
    std::vector<double> probs;  // indexed by edge index

    Environment() = default;
    Environment(const TorusGraph& g, std::vector<double> p) : graph(g), probs(std::move(p)) {
        validate();
    }

    double at(Vertex v, int dir) const {
        return probs[static_cast<std::size_t>(graph.edge_index(v, dir))];
    }
    double operator[](EdgeIndex e) const { return probs[static_cast<std::size_t>(e)]; }

    void validate() const {
        if (probs.size() != static_cast<std::size_t>(graph.edge_count()))
            throw std::invalid_argument("environment: wrong number of edge probabilities");
        const std::int64_t n = graph.vertex_count();
        const int deg = graph.degree();
        for (Vertex v = 0; v < n; ++v) {
            double row = 0.0;
            for (int dir = 0; dir < deg; ++dir) {
                const double p = at(v, dir);
                if (!(p > 0.0) || p > 1.0)
                    throw std::invalid_argument("environment: probabilities must lie in (0,1]");
                row += p;
            }
            if (std::abs(row - 1.0) > 1e-12)
                throw std::invalid_argument("environment: row does not sum to 1");
        }
    }
};

//! Draw an i.i.d. Dirichlet exit vector at every vertex.
inline Environment sample_environment(const Weights& w, const TorusGraph& g, Rng& rng) {
    w.validate();
    if (w.d != g.d) throw std::invalid_argument("sample_environment: dimension mismatch");
    const std::int64_t n = g.vertex_count();
    const int deg = g.degree();
    std::vector<double> probs(static_cast<std::size_t>(g.edge_count()));
    for (Vertex v = 0; v < n; ++v) {
        std::span<double> row(probs.data() + v * deg, static_cast<std::size_t>(deg));
        rng.dirichlet(w.alpha, row);
    }
    return Environment(g, std::move(probs));
}

//! Shift the environment by x: the new origin sees what x used to see.
inline Environment translate_environment(const Environment& env, const std::vector<int>& x) {
    const TorusGraph& g = env.graph;
    if (x.size() != static_cast<std::size_t>(g.d))
        throw std::invalid_argument("translate_environment: bad shift vector");
    std::vector<double> probs(env.probs.size());
    const std::int64_t n = g.vertex_count();
    const int deg = g.degree();
    for (Vertex v = 0; v < n; ++v) {
        auto c = g.coords(v);
        for (int i = 0; i < g.d; ++i) c[static_cast<std::size_t>(i)] += x[static_cast<std::size_t>(i)];
        const Vertex shifted = g.vertex(c);
        for (int dir = 0; dir < deg; ++dir)
            probs[static_cast<std::size_t>(g.edge_index(v, dir))] = env.at(shifted, dir);
    }
    return Environment(g, std::move(probs));
}

//! CSV serialization: header + one (edge index, probability) row per edge.
inline void write_environment_csv(const Environment& env, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path);
    out << "edge_index,probability\n";
    out.precision(17);
    for (std::size_t e = 0; e < env.probs.size(); ++e)
        out << e << ',' << env.probs[e] << '\n';
    if (!out) throw std::runtime_error("failed writing " + path);
}

inline Environment read_environment_csv(const TorusGraph& g, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "edge_index,probability")
        throw std::runtime_error("bad environment csv header in " + path);
    std::vector<double> probs(static_cast<std::size_t>(g.edge_count()), -1.0);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string tok;
        if (!std::getline(row, tok, ',')) throw std::runtime_error("bad row in " + path);
        const std::size_t e = static_cast<std::size_t>(std::stoll(tok));
        if (e >= probs.size()) throw std::runtime_error("edge index out of range in " + path);
        if (!std::getline(row, tok, ',')) throw std::runtime_error("bad row in " + path);
        probs[e] = std::stod(tok);
    }
    return Environment(g, std::move(probs));
}

}  // namespace rwde
