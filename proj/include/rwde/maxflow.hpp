#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "rwde/errors.hpp"
#include "rwde/torus.hpp"

namespace rwde {

//! Small directed graph with floating-point arc capacities. Parallel arcs and
//! opposite arcs are allowed; self-loops are not.
struct Digraph {
    std::int64_t vertices = 0;
    struct Arc {
        std::int64_t tail = 0;
        std::int64_t head = 0;
        double capacity = 0.0;
    };
    std::vector<Arc> arcs;

    void add_arc(std::int64_t tail, std::int64_t head, double capacity) {
        if (tail == head) throw std::invalid_argument("digraph: self-loops not supported");
        if (tail < 0 || head < 0 || tail >= vertices || head >= vertices)
            throw std::invalid_argument("digraph: arc endpoint out of range");
        if (!(capacity >= 0.0)) throw std::invalid_argument("digraph: capacity must be nonnegative");
        arcs.push_back(Arc{tail, head, capacity});
    }
};

//! Build the digraph of a torus; arc i is exactly torus edge index i.
inline Digraph torus_digraph(const TorusGraph& g, const EdgeField& capacities) {
    if (!(capacities.graph == g)) throw std::invalid_argument("torus_digraph: mismatched capacity field");
    Digraph dg;
    dg.vertices = g.vertex_count();
    dg.arcs.reserve(static_cast<std::size_t>(g.edge_count()));
    const std::int64_t n = g.vertex_count();
    for (Vertex v = 0; v < n; ++v)
        for (int dir = 0; dir < g.degree(); ++dir)
            dg.add_arc(v, g.neighbor(v, dir), capacities[g.edge_index(v, dir)]);
    return dg;
}

//! Source-side vertex set of a cut, in the inclusion-minimal form: every member
//! is reachable from the source along original arcs inside the set.
struct CutSet {
    std::vector<std::int64_t> vertices;   // sorted, contains the source
    std::vector<std::size_t> arcs;        // arcs leaving the set
    double capacity = 0.0;
};

struct MaxFlowResult {
    double value = 0.0;
    std::vector<double> flow;  // per input arc, 0 <= flow <= capacity exactly
    CutSet min_cut;
};

namespace detail {

class Dinic {
  public:
    Dinic(const Digraph& g, double eps) : graph_(g), eps_(eps), first_out_(g.vertices + 1, 0) {
        // residual arcs: forward copy of each input arc plus its reverse
        heads_.reserve(2 * g.arcs.size());
        std::vector<std::int64_t> degree(static_cast<std::size_t>(g.vertices), 0);
        for (const auto& a : g.arcs) {
            ++degree[static_cast<std::size_t>(a.tail)];
            ++degree[static_cast<std::size_t>(a.head)];
        }
        for (std::int64_t v = 0; v < g.vertices; ++v)
            first_out_[static_cast<std::size_t>(v + 1)] =
                first_out_[static_cast<std::size_t>(v)] + degree[static_cast<std::size_t>(v)];
        heads_.assign(static_cast<std::size_t>(first_out_.back()), 0);
        residual_.assign(heads_.size(), 0.0);
        pair_.assign(heads_.size(), 0);
        arc_slot_.assign(g.arcs.size(), 0);
        std::vector<std::int64_t> cursor(first_out_.begin(), first_out_.end() - 1);
        for (std::size_t i = 0; i < g.arcs.size(); ++i) {
            const auto& a = g.arcs[i];
            const auto fwd = static_cast<std::size_t>(cursor[static_cast<std::size_t>(a.tail)]++);
            const auto bwd = static_cast<std::size_t>(cursor[static_cast<std::size_t>(a.head)]++);
            heads_[fwd] = a.head;
            heads_[bwd] = a.tail;
            residual_[fwd] = a.capacity;
            residual_[bwd] = 0.0;
            pair_[fwd] = bwd;
            pair_[bwd] = fwd;
            arc_slot_[i] = fwd;
        }
    }

    double run(std::int64_t s, std::int64_t t) {
        double total = 0.0;
        while (bfs(s, t)) {
            iter_ = first_out_;
            for (;;) {
                const double pushed = dfs(s, t, std::numeric_limits<double>::infinity());
                if (pushed <= 0.0) break;
                total += pushed;
            }
        }
        return total;
    }

    double flow_on(std::size_t input_arc) const {
        const std::size_t fwd = arc_slot_[input_arc];
        const double f = graph_.arcs[input_arc].capacity - residual_[fwd];
        return f < 0.0 ? 0.0 : f;
    }

    //! Vertices reachable from s in the residual graph.
    std::vector<char> residual_reachable(std::int64_t s) const {
        std::vector<char> seen(static_cast<std::size_t>(graph_.vertices), 0);
        std::vector<std::int64_t> stack{s};
        seen[static_cast<std::size_t>(s)] = 1;
        while (!stack.empty()) {
            const std::int64_t v = stack.back();
            stack.pop_back();
            for (auto i = first_out_[static_cast<std::size_t>(v)]; i < first_out_[static_cast<std::size_t>(v + 1)]; ++i) {
                if (residual_[static_cast<std::size_t>(i)] > eps_ && !seen[static_cast<std::size_t>(heads_[static_cast<std::size_t>(i)])]) {
                    seen[static_cast<std::size_t>(heads_[static_cast<std::size_t>(i)])] = 1;
                    stack.push_back(heads_[static_cast<std::size_t>(i)]);
                }
            }
        }
        return seen;
    }

  private:
    bool bfs(std::int64_t s, std::int64_t t) {
        level_.assign(static_cast<std::size_t>(graph_.vertices), -1);
        std::queue<std::int64_t> queue;
        queue.push(s);
        level_[static_cast<std::size_t>(s)] = 0;
        while (!queue.empty()) {
            const std::int64_t v = queue.front();
            queue.pop();
            for (auto i = first_out_[static_cast<std::size_t>(v)]; i < first_out_[static_cast<std::size_t>(v + 1)]; ++i) {
                const std::int64_t w = heads_[static_cast<std::size_t>(i)];
                if (residual_[static_cast<std::size_t>(i)] > eps_ && level_[static_cast<std::size_t>(w)] < 0) {
                    level_[static_cast<std::size_t>(w)] = level_[static_cast<std::size_t>(v)] + 1;
                    queue.push(w);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    double dfs(std::int64_t v, std::int64_t t, double limit) {
        if (v == t) return limit;
        for (auto& i = iter_[static_cast<std::size_t>(v)]; i < first_out_[static_cast<std::size_t>(v + 1)]; ++i) {
            const auto slot = static_cast<std::size_t>(i);
            const std::int64_t w = heads_[slot];
            if (residual_[slot] <= eps_ || level_[static_cast<std::size_t>(w)] != level_[static_cast<std::size_t>(v)] + 1)
                continue;
            const double pushed = dfs(w, t, std::min(limit, residual_[slot]));
            if (pushed > 0.0) {
                residual_[slot] -= pushed;
                residual_[pair_[slot]] += pushed;
                return pushed;
            }
        }
        level_[static_cast<std::size_t>(v)] = -1;
        return 0.0;
    }

    const Digraph& graph_;
    double eps_;
    std::vector<std::int64_t> first_out_;
    std::vector<std::int64_t> heads_;
    std::vector<double> residual_;
    std::vector<std::size_t> pair_;
    std::vector<std::size_t> arc_slot_;
    std::vector<int> level_;
    std::vector<std::int64_t> iter_;
};

//! Restrict a source-side set to the vertices reachable from the source along
//! original arcs staying inside the set. This never enlarges the cut value.
inline std::vector<char> minimal_cut_side(const Digraph& g, std::int64_t s, const std::vector<char>& side) {
    std::vector<std::vector<std::int64_t>> out(static_cast<std::size_t>(g.vertices));
    for (const auto& a : g.arcs)
        if (side[static_cast<std::size_t>(a.tail)] && side[static_cast<std::size_t>(a.head)])
            out[static_cast<std::size_t>(a.tail)].push_back(a.head);
    std::vector<char> keep(static_cast<std::size_t>(g.vertices), 0);
    std::vector<std::int64_t> stack{s};
    keep[static_cast<std::size_t>(s)] = 1;
    while (!stack.empty()) {
        const std::int64_t v = stack.back();
        stack.pop_back();
        for (std::int64_t w : out[static_cast<std::size_t>(v)])
            if (!keep[static_cast<std::size_t>(w)]) {
                keep[static_cast<std::size_t>(w)] = 1;
                stack.push_back(w);
            }
    }
    return keep;
}

inline CutSet cut_from_side(const Digraph& g, const std::vector<char>& side) {
    CutSet cut;
    for (std::int64_t v = 0; v < g.vertices; ++v)
        if (side[static_cast<std::size_t>(v)]) cut.vertices.push_back(v);
    for (std::size_t i = 0; i < g.arcs.size(); ++i) {
        const auto& a = g.arcs[i];
        if (side[static_cast<std::size_t>(a.tail)] && !side[static_cast<std::size_t>(a.head)]) {
            cut.arcs.push_back(i);
            cut.capacity += a.capacity;
        }
    }
    return cut;
}

}  // namespace detail

//! Capacity comparisons use an absolute tolerance scaled to the instance.
inline double flow_epsilon(const Digraph& g) {
    double cap_max = 1.0;
    for (const auto& a : g.arcs) cap_max = std::max(cap_max, a.capacity);
    return 1e-12 * cap_max;
}

//! Dinic max flow together with the dual minimum cut (source side restricted
//! to its inclusion-minimal form).
inline MaxFlowResult max_flow_min_cut(const Digraph& g, std::int64_t source, std::int64_t sink) {
    if (source == sink) throw std::invalid_argument("max flow: source equals sink");
    if (source < 0 || sink < 0 || source >= g.vertices || sink >= g.vertices)
        throw std::invalid_argument("max flow: terminal out of range");
    detail::Dinic dinic(g, flow_epsilon(g));
    MaxFlowResult out;
    out.value = dinic.run(source, sink);
    out.flow.resize(g.arcs.size());
    for (std::size_t i = 0; i < g.arcs.size(); ++i) out.flow[i] = dinic.flow_on(i);
    auto side = dinic.residual_reachable(source);
    if (side[static_cast<std::size_t>(sink)])
        throw invariant_violation("max flow: sink still reachable after termination");
    side = detail::minimal_cut_side(g, source, side);
    out.min_cut = detail::cut_from_side(g, side);
    return out;
}

//! A divergence-constrained flow problem: route demands[x] units from the
//! source to every vertex x without exceeding arc capacities.
struct FlowProblem {
    Digraph graph;
    std::int64_t source = 0;
    std::vector<double> demands;  // nonnegative, indexed by vertex
};

struct FeasibleFlowResult {
    bool feasible = false;
    std::vector<double> theta;     // per arc, only meaningful when feasible
    double total_demand = 0.0;
    double routed = 0.0;
    CutSet violating_cut;          // only meaningful when infeasible
    double cut_deficiency = 0.0;   // demand beyond the cut minus its capacity
};

//! Decide feasibility by max flow to an auxiliary sink taking demands[x] from
//! each vertex. On failure the reported cut K satisfies
//! capacity(out-arcs of K) < demand(complement of K).
inline FeasibleFlowResult feasible_flow(const FlowProblem& problem) {
    const Digraph& g = problem.graph;
    if (problem.demands.size() != static_cast<std::size_t>(g.vertices))
        throw std::invalid_argument("feasible_flow: demand vector size mismatch");
    for (double p : problem.demands)
        if (!(p >= 0.0)) throw std::invalid_argument("feasible_flow: demands must be nonnegative");

    Digraph extended = g;
    extended.vertices = g.vertices + 1;
    const std::int64_t sink = g.vertices;
    double total = 0.0;
    for (std::int64_t v = 0; v < g.vertices; ++v) {
        const double p = problem.demands[static_cast<std::size_t>(v)];
        total += p;
        if (p > 0.0) extended.add_arc(v, sink, p);
    }

    FeasibleFlowResult out;
    out.total_demand = total;
    if (total == 0.0) {
        out.feasible = true;
        out.theta.assign(g.arcs.size(), 0.0);
        return out;
    }

    detail::Dinic dinic(extended, flow_epsilon(extended));
    out.routed = dinic.run(problem.source, sink);
    const double tol = 1e-9 * std::max(1.0, total);
    if (out.routed >= total - tol) {
        out.feasible = true;
        out.theta.resize(g.arcs.size());
        for (std::size_t i = 0; i < g.arcs.size(); ++i) out.theta[i] = dinic.flow_on(i);
        return out;
    }

    auto side = dinic.residual_reachable(problem.source);
    side.resize(static_cast<std::size_t>(g.vertices));  // sink is never on the source side
    side = detail::minimal_cut_side(g, problem.source, side);
    out.violating_cut = detail::cut_from_side(g, side);
    double unreached_demand = 0.0;
    for (std::int64_t v = 0; v < g.vertices; ++v)
        if (!side[static_cast<std::size_t>(v)]) unreached_demand += problem.demands[static_cast<std::size_t>(v)];
    out.cut_deficiency = unreached_demand - out.violating_cut.capacity;
    return out;
}

}  // namespace rwde
