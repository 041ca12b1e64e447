#pragma once

#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "rwde/weights.hpp"

namespace rwde {

using Vertex = std::int64_t;
using EdgeIndex = std::int64_t;

//! d-dimensional discrete torus of side N >= 3. Vertices are indexed in
//! row-major order over coordinates in [0,N)^d; the directed edge (v, dir)
//! has index v*2d + dir. Lattice identification maps vertex coordinates to
//! representatives in [-N/2, N/2)^d, so vertex 0 is the lattice origin.
struct TorusGraph {
    int d = 0;
    int N = 0;

    TorusGraph() = default;
    TorusGraph(int dim, int side) : d(dim), N(side) {
        if (dim < 1) throw std::invalid_argument("torus: dimension must be >= 1");
        if (side < 3) throw std::invalid_argument("torus: side must be >= 3");
        // Guard against vertex-count overflow.
        std::int64_t n = 1;
        for (int i = 0; i < dim; ++i) {
            n *= side;
            if (n > (std::int64_t{1} << 40)) throw std::invalid_argument("torus: too many vertices");
        }
    }

    std::int64_t vertex_count() const {
        std::int64_t n = 1;
        for (int i = 0; i < d; ++i) n *= N;
        return n;
    }
    std::int64_t edge_count() const { return vertex_count() * 2 * d; }
    int degree() const { return 2 * d; }

    EdgeIndex edge_index(Vertex v, int dir) const { return v * (2 * d) + dir; }
    Vertex edge_tail(EdgeIndex e) const { return e / (2 * d); }
    int edge_direction(EdgeIndex e) const { return static_cast<int>(e % (2 * d)); }

    std::vector<int> coords(Vertex v) const {
        std::vector<int> c(static_cast<std::size_t>(d));
        for (int i = d - 1; i >= 0; --i) {
            c[static_cast<std::size_t>(i)] = static_cast<int>(v % N);
            v /= N;
        }
        return c;
    }

    Vertex vertex(const std::vector<int>& c) const {
        Vertex v = 0;
        for (int i = 0; i < d; ++i) {
            int x = c[static_cast<std::size_t>(i)] % N;
            if (x < 0) x += N;
            v = v * N + x;
        }
        return v;
    }

    //! Head of the directed edge (v, dir).
    Vertex neighbor(Vertex v, int dir) const {
        const int axis = dir < d ? dir : dir - d;
        const int step = dir < d ? 1 : N - 1;  // -1 mod N
        std::int64_t stride = 1;
        for (int i = axis + 1; i < d; ++i) stride *= N;
        const std::int64_t axis_val = (v / stride) % N;
        const std::int64_t new_val = (axis_val + step) % N;
        return v + (new_val - axis_val) * stride;
    }

    //! Index of the reversed edge: (head, opposite direction).
    EdgeIndex reverse_edge(EdgeIndex e) const {
        const Vertex tail = edge_tail(e);
        const int dir = edge_direction(e);
        return edge_index(neighbor(tail, dir), opposite_direction(dir, d));
    }

    //! Torus graph distance (L1 with wrap-around).
    int distance(Vertex a, Vertex b) const {
        const auto ca = coords(a);
        const auto cb = coords(b);
        int dist = 0;
        for (int i = 0; i < d; ++i) {
            int delta = std::abs(ca[static_cast<std::size_t>(i)] - cb[static_cast<std::size_t>(i)]);
            dist += std::min(delta, N - delta);
        }
        return dist;
    }

    //! Lattice representative of a vertex, coordinates in [-N/2, N/2).
    std::vector<long long> lattice_point(Vertex v) const {
        auto c = coords(v);
        std::vector<long long> p(static_cast<std::size_t>(d));
        const int half = (N + 1) / 2;  // smallest x with x - N < -N/2 <= x
        for (int i = 0; i < d; ++i) {
            const int x = c[static_cast<std::size_t>(i)];
            p[static_cast<std::size_t>(i)] = x >= half ? x - N : x;
        }
        return p;
    }

    //! Vertices within torus distance r of the origin.
    std::vector<Vertex> ball(int r) const {
        std::vector<Vertex> out;
        const std::int64_t n = vertex_count();
        for (Vertex v = 0; v < n; ++v)
            if (distance(0, v) <= r) out.push_back(v);
        return out;
    }

    bool operator==(const TorusGraph& o) const { return d == o.d && N == o.N; }
};

//! One double per directed edge of a torus.
struct EdgeField {
    TorusGraph graph;
    std::vector<double> values;

    EdgeField() = default;
    explicit EdgeField(const TorusGraph& g, double fill = 0.0)
        : graph(g), values(static_cast<std::size_t>(g.edge_count()), fill) {}

    double& operator[](EdgeIndex e) { return values[static_cast<std::size_t>(e)]; }
    double operator[](EdgeIndex e) const { return values[static_cast<std::size_t>(e)]; }
    std::size_t size() const { return values.size(); }
};

//! One double per vertex of a torus.
struct VertexField {
    TorusGraph graph;
    std::vector<double> values;

    VertexField() = default;
    explicit VertexField(const TorusGraph& g, double fill = 0.0)
        : graph(g), values(static_cast<std::size_t>(g.vertex_count()), fill) {}

    double& operator[](Vertex v) { return values[static_cast<std::size_t>(v)]; }
    double operator[](Vertex v) const { return values[static_cast<std::size_t>(v)]; }
    std::size_t size() const { return values.size(); }
};

//! Divergence of an edge field: out-flow minus in-flow at each vertex.
//! The components always sum to zero (every edge appears once with each sign).
inline VertexField divergence(const EdgeField& theta) {
    const TorusGraph& g = theta.graph;
    VertexField div(g, 0.0);
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v) {
        for (int dir = 0; dir < g.degree(); ++dir) {
            const double val = theta[g.edge_index(v, dir)];
            div[v] += val;
            div[g.neighbor(v, dir)] -= val;
        }
    }
    return div;
}

inline double dot(const EdgeField& a, const EdgeField& b) {
    if (!(a.graph == b.graph)) throw std::invalid_argument("dot: mismatched graphs");
    double s = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
    return s;
}

inline double l2_squared(const EdgeField& a) { return dot(a, a); }

}  // namespace rwde
