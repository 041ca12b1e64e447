// Acceptance harness: runs the twelve release criteria and prints one
// [PASS]/[FAIL] line per criterion, plus a JSON summary of the measured
// numbers. Usage: acceptance <k|all>. Exit code 0 iff everything asked
// for passed. Every criterion is a pure function of the fixed master seed,
// which criterion 12 exploits to verify byte-identical re-runs.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwde/rwde.hpp"

using json = nlohmann::ordered_json;
using namespace rwde;

namespace {

constexpr std::uint64_t kSeed = 123456789ULL;

struct Outcome {
    bool pass = false;
    std::string detail;
    json summary;
};

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

Outcome criterion_1() {
    Outcome out;
    out.summary["criterion"] = 1;
    json sets = json::array();
    bool pass = true;
    double worst_rel = 0.0, worst_sum = 0.0;
    for (const Weights& w : {Weights::uniform(3, 1.0), Weights(3, {2, 1, 1, 1, 1, 1})}) {
        const auto rep = annealed_consistency_check(w, 4);
        json entry;
        entry["alpha"] = w.alpha;
        entry["paths_checked"] = rep.paths_checked;
        entry["max_relative_error"] = rep.max_relative_error;
        entry["probability_sums"] = rep.probability_sums;
        pass = pass && rep.max_relative_error <= 1e-12;
        worst_rel = std::max(worst_rel, rep.max_relative_error);
        for (double s : rep.probability_sums) {
            pass = pass && std::abs(s - 1.0) <= 1e-10;
            worst_sum = std::max(worst_sum, std::abs(s - 1.0));
        }
        sets.push_back(entry);
    }
    out.summary["weight_sets"] = sets;
    out.pass = pass;
    out.detail = "two-formula agreement on all paths of length <= 4: max rel err " + fmt(worst_rel) +
                 ", max |sum-1| " + fmt(worst_sum);
    return out;
}

Outcome criterion_2() {
    Outcome out;
    out.summary["criterion"] = 2;
    const Weights w(3, {2, 1, 1, 1, 1, 1});
    ReversalLawOptions opts;
    opts.replicas = 10000;
    const auto reports = reversal_law_test(w, 4, kSeed, opts);
    json dirs = json::array();
    bool pass = true;
    double min_p = 1.0, max_wrong = 0.0;
    for (const auto& rep : reports) {
        // the unswapped law only differs on the swapped axis; the deliberate
        // misfit must reject exactly there
        const double unswapped_a = w.alpha[static_cast<std::size_t>(rep.direction)];
        const bool informative = std::abs(unswapped_a - rep.beta_a) > 1e-12;
        json entry;
        entry["direction"] = rep.direction;
        entry["beta_a"] = rep.beta_a;
        entry["beta_b"] = rep.beta_b;
        entry["p_value"] = rep.reversed_fit.p_value;
        entry["wrong_null_differs"] = informative;
        entry["wrong_null_p_value"] = rep.wrong_null.p_value;
        pass = pass && rep.reversed_fit.p_value > 0.01;
        if (informative) {
            pass = pass && rep.wrong_null.p_value < 1e-6;
            max_wrong = std::max(max_wrong, rep.wrong_null.p_value);
        }
        min_p = std::min(min_p, rep.reversed_fit.p_value);
        dirs.push_back(entry);
    }
    out.summary["N"] = 4;
    out.summary["replicas"] = opts.replicas;
    out.summary["directions"] = dirs;
    out.pass = pass;
    out.detail = "reversed marginals: min KS p " + fmt(min_p) + " (> 0.01), wrong-null max p " +
                 fmt(max_wrong) + " (< 1e-6)";
    return out;
}

Outcome criterion_3() {
    Outcome out;
    out.summary["criterion"] = 3;
    const Weights w = Weights::uniform(3, 0.7);
    json sizes = json::array();
    bool pass = true;
    double worst = 0.0;
    int ni = 0;
    for (int N : {3, 4, 5}) {
        const TorusGraph g(3, N);
        double size_worst = 0.0;
        for (int r = 0; r < 1000; ++r) {
            Rng env_rng = Rng::stream(kSeed, (1ULL << 20) + static_cast<std::uint64_t>(ni * 2000 + 2 * r));
            Rng theta_rng = Rng::stream(kSeed, (1ULL << 20) + static_cast<std::uint64_t>(ni * 2000 + 2 * r + 1));
            const Environment env = sample_environment(w, g, env_rng);
            const auto sol = stationary_distribution(env);
            EdgeField theta(g, 0.0);
            for (auto& x : theta.values) x = 2.0 * theta_rng.uniform() - 1.0;
            const auto identity = reversal_identity_check(env, sol, theta);
            size_worst = std::max(size_worst, identity.rel_error);
        }
        json entry;
        entry["N"] = N;
        entry["pairs"] = 1000;
        entry["max_relative_error"] = size_worst;
        sizes.push_back(entry);
        worst = std::max(worst, size_worst);
        pass = pass && size_worst <= 1e-8;
        ++ni;
    }
    out.summary["sizes"] = sizes;
    out.pass = pass;
    out.detail = "quotient identity on 3000 random (environment, flow) pairs: max rel err " + fmt(worst);
    return out;
}

Outcome criterion_4() {
    Outcome out;
    out.summary["criterion"] = 4;
    const Weights w = Weights::uniform(3, 1.0);
    const double p = 1.5;
    const double kappa_w = kappa(w);
    const TorusGraph g(3, 8);
    const BoostedCapacity cap{w, 0, kappa_w, p / kappa_w};
    const EdgeField capacities = capacity_field(g, cap);
    const auto trace = construct_theta_n(g, capacities, p, kSeed);

    int holds = 0, violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (int r = 0; r < 1000; ++r) {
        Rng rng = Rng::stream(kSeed, (1ULL << 21) + static_cast<std::uint64_t>(r));
        const Environment env = sample_environment(w, g, rng);
        const auto sol = stationary_distribution(env);
        const auto bound = density_bound_check(env, sol, trace.theta, p);
        if (bound.holds) ++holds; else ++violations;
        min_margin = std::min(min_margin, bound.log_rhs - bound.log_lhs);
    }
    out.summary["N"] = 8;
    out.summary["p"] = p;
    out.summary["environments"] = 1000;
    out.summary["holds"] = holds;
    out.summary["violations"] = violations;
    out.summary["min_margin"] = min_margin;
    out.summary["constructor"] = {{"eta0", trace.eta0},
                                  {"eta1_used", trace.eta1_used},
                                  {"divergence_error", trace.divergence_error},
                                  {"dominated", trace.dominated}};
    out.pass = violations == 0 && holds == 1000;
    out.detail = "pathwise bound held for " + std::to_string(holds) +
                 "/1000 environments (min log-margin " + fmt(min_margin) + ")";
    return out;
}

Outcome criterion_5() {
    Outcome out;
    out.summary["criterion"] = 5;

    MomentOptions opts;
    opts.p = 2.0;
    opts.replicas = 2000;

    // (a) second moments stay flat when the exponent is above p
    const Weights wa = Weights::uniform(3, 0.3);
    json part_a;
    part_a["alpha"] = wa.alpha;
    part_a["kappa"] = kappa(wa);
    part_a["p"] = opts.p;
    json means_a = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    int idx = 0;
    for (int N : {4, 6, 8}) {
        const auto est = moment_experiment(wa, N, static_cast<std::size_t>(idx++), kSeed, opts);
        json entry;
        entry["N"] = N;
        entry["mean"] = est.mean;
        entry["ci_low"] = est.ci_low;
        entry["ci_high"] = est.ci_high;
        entry["solver_failures"] = est.solver_failures;
        means_a.push_back(entry);
        lo = std::min(lo, est.mean);
        hi = std::max(hi, est.mean);
    }
    const double spread = hi / lo;
    part_a["means"] = means_a;
    part_a["max_over_min"] = spread;
    const bool pass_a = spread <= 1.5;

    // (b) below the exponent the same moment blows up with the torus size.
    // The first moment is identically 1 for every size (a translation
    // invariance identity), so growth is read off the second moment; the
    // measured first moments are reported alongside as the reference.
    const Weights wb = Weights::uniform(3, 0.05);
    json part_b;
    part_b["alpha"] = wb.alpha;
    part_b["kappa"] = kappa(wb);
    part_b["p"] = opts.p;
    const auto est4 = moment_experiment(wb, 4, 0, kSeed, opts);
    const auto est8 = moment_experiment(wb, 8, 1, kSeed, opts);
    const double growth = est8.mean / est4.mean;
    part_b["mean_N4"] = est4.mean;
    part_b["mean_N8"] = est8.mean;
    part_b["growth_factor"] = growth;
    part_b["first_moment_N4"] = est4.mean_density;
    part_b["first_moment_N8"] = est8.mean_density;
    part_b["solver_failures"] = est4.solver_failures + est8.solver_failures;
    const bool pass_b = growth >= 2.0;

    out.summary["flat_regime"] = part_a;
    out.summary["growth_regime"] = part_b;
    out.pass = pass_a && pass_b;
    out.detail = "second moment spread " + fmt(spread) + " (<= 1.5) at kappa=3; growth x" + fmt(growth) +
                 " (>= 2) at kappa=0.5 [exact first moment is 1 at every size; sampled " +
                 fmt(est4.mean_density) + " -> " + fmt(est8.mean_density) + "]";
    return out;
}

Outcome criterion_6() {
    Outcome out;
    out.summary["criterion"] = 6;
    const Weights w = Weights::uniform(3, 1.0);
    const double p = 1.5;
    const BoostedCapacity cap{w, 0, kappa(w), p / kappa(w)};

    json runs = json::array();
    bool pass = true;
    double l2_base = 0.0;
    double worst_ratio = 1.0;
    for (int N : {8, 12, 16}) {
        const TorusGraph g(3, N);
        const EdgeField capacities = capacity_field(g, cap);
        const auto trace = construct_theta_n(g, capacities, p, kSeed);

        // re-verify the postconditions independently of the constructor
        const VertexField div = divergence(trace.theta);
        const double n = static_cast<double>(g.vertex_count());
        double div_err = 0.0;
        for (Vertex v = 0; v < g.vertex_count(); ++v) {
            const double target = v == 0 ? p * (n - 1.0) / n : -p / n;
            div_err = std::max(div_err, std::abs(div[v] - target));
        }
        bool dominated = true;
        for (std::size_t e = 0; e < trace.theta.values.size(); ++e)
            dominated = dominated && trace.theta.values[e] <= capacities.values[e];

        if (N == 8) l2_base = trace.l2_theta;
        const double ratio = trace.l2_theta / l2_base;
        worst_ratio = std::max(worst_ratio, std::max(ratio, 1.0 / ratio));
        pass = pass && div_err <= 1e-9 && dominated && ratio <= 1.25 && ratio >= 1.0 / 1.25;

        json entry;
        entry["N"] = N;
        entry["divergence_error"] = div_err;
        entry["dominated"] = dominated;
        entry["l2_theta"] = trace.l2_theta;
        entry["l2_ratio_vs_N8"] = ratio;
        entry["eta1_used"] = trace.eta1_used;
        runs.push_back(entry);
    }
    out.summary["p"] = p;
    out.summary["runs"] = runs;
    out.pass = pass;
    out.detail = "divergence <= 1e-9, exact domination, L2 ratio spread " + fmt(worst_ratio) +
                 " (<= 1.25) across N in {8,12,16}";
    return out;
}

Outcome criterion_7() {
    Outcome out;
    out.summary["criterion"] = 7;
    json runs = json::array();
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int N : {8, 16, 24}) {
        const TorusGraph g(3, N);
        const Vertex x = 0;
        const Vertex y = g.vertex({N / 2, N / 2, N / 2});
        Rng rng = Rng::stream(kSeed, (1ULL << 22) + static_cast<std::uint64_t>(N));
        const EdgeField theta = dispersed_unit_flow(g, x, y, 2048, rng);
        const VertexField thru = throughput(theta);
        // The sup is attained on the deterministic final approach into y that
        // the axis-ordered tie break pins down (throughput 1 at distance d);
        // the bulk constant away from that suffix is reported alongside.
        double constant = 0.0, bulk = 0.0;
        for (Vertex z = 0; z < g.vertex_count(); ++z) {
            const double r = static_cast<double>(std::min(g.distance(x, z), g.distance(y, z)));
            constant = std::max(constant, thru[z] * r * r);
            if (r >= 4.0) bulk = std::max(bulk, thru[z] * r * r);
        }
        json entry;
        entry["N"] = N;
        entry["fitted_constant"] = constant;
        entry["bulk_constant_dist_ge_4"] = bulk;
        runs.push_back(entry);
        lo = std::min(lo, constant);
        hi = std::max(hi, constant);
    }
    const double spread = hi / lo;
    out.summary["runs"] = runs;
    out.summary["max_over_min"] = spread;
    out.pass = spread <= 2.0;
    out.detail = "antipodal unit-flow decay constant spread " + fmt(spread) + " (<= 2) across N in {8,16,24}";
    return out;
}

Outcome criterion_8() {
    Outcome out;
    out.summary["criterion"] = 8;
    int agreements = 0, feasible_count = 0, infeasible_count = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        Rng rng = Rng::stream(kSeed, (1ULL << 23) + static_cast<std::uint64_t>(t));
        Digraph g;
        g.vertices = 2 + static_cast<std::int64_t>(rng.uniform_below(9));  // 2..10
        for (std::int64_t u = 0; u < g.vertices; ++u)
            for (std::int64_t v = 0; v < g.vertices; ++v) {
                if (u == v) continue;
                if (rng.uniform() < 0.3)
                    g.add_arc(u, v, 0.25 * static_cast<double>(1 + rng.uniform_below(16)));
            }
        std::vector<double> demands(static_cast<std::size_t>(g.vertices), 0.0);
        for (std::size_t v = 1; v < demands.size(); ++v)
            demands[v] = 0.25 * static_cast<double>(rng.uniform_below(6));

        const auto res = feasible_flow(FlowProblem{g, 0, demands});

        // exhaustive cut-condition oracle over all source-containing subsets
        bool oracle = true;
        const int nv = static_cast<int>(g.vertices);
        for (std::uint32_t mask = 0; mask < (1u << nv) && oracle; ++mask) {
            if (!(mask & 1u)) continue;
            double cap = 0.0;
            for (const auto& a : g.arcs)
                if ((mask & (1u << a.tail)) && !(mask & (1u << a.head))) cap += a.capacity;
            double need = 0.0;
            for (int v = 0; v < nv; ++v)
                if (!(mask & (1u << v))) need += demands[static_cast<std::size_t>(v)];
            if (need > cap + 1e-9) oracle = false;
        }
        if (res.feasible == oracle) ++agreements;
        if (oracle) ++feasible_count; else ++infeasible_count;
    }
    out.summary["trials"] = trials;
    out.summary["agreements"] = agreements;
    out.summary["feasible_instances"] = feasible_count;
    out.summary["infeasible_instances"] = infeasible_count;
    out.pass = agreements == trials;
    out.detail = std::to_string(agreements) + "/1000 verdicts match the exhaustive cut condition (" +
                 std::to_string(feasible_count) + " feasible, " + std::to_string(infeasible_count) +
                 " infeasible)";
    return out;
}

Outcome criterion_9() {
    Outcome out;
    out.summary["criterion"] = 9;
    const Weights w = Weights::uniform(3, 1.0);
    const BoostedCapacity plain{w, -1, 0.0, 1.0};
    const BoostedCapacity boosted = boosted_weights(w, 0);
    const double kappa_w = kappa(w);

    bool pass = true;
    json uniform = json::array(), strengthened = json::array();
    for (int R : {2, 3}) {
        const double cut_plain = min_cut_truncated_lattice(plain, R);
        const double cut_boost = min_cut_truncated_lattice(boosted, R);
        pass = pass && std::abs(cut_plain - 6.0) <= 1e-9 && cut_boost >= kappa_w - 1e-9;
        uniform.push_back({{"R", R}, {"value", cut_plain}});
        strengthened.push_back({{"R", R}, {"value", cut_boost}});
    }
    out.summary["uniform"] = uniform;
    out.summary["boosted"] = strengthened;
    out.summary["kappa"] = kappa_w;
    out.pass = pass;
    out.detail = "uniform truncated cut = 6 at R in {2,3}; boosted cut >= kappa = " + fmt(kappa_w);
    return out;
}

Outcome criterion_10() {
    Outcome out;
    out.summary["criterion"] = 10;
    json runs = json::array();
    bool pass = true;
    double worst = 0.0;
    int j = 0;
    for (double target : {0.5, 1.0, 2.0}) {
        const Weights w = Weights::uniform(3, target / 10.0);
        Rng rng = Rng::stream(kSeed, (1ULL << 24) + static_cast<std::uint64_t>(j++));
        const auto rep = trap_tail_experiment(w, 1000000, rng);
        json entry;
        entry["kappa"] = target;
        entry["estimate"] = rep.hill.estimate;
        entry["k"] = rep.hill.k;
        entry["ci_low"] = rep.hill.ci_low;
        entry["ci_high"] = rep.hill.ci_high;
        entry["relative_error"] = rep.relative_error;
        runs.push_back(entry);
        pass = pass && rep.relative_error <= 0.15;
        worst = std::max(worst, rep.relative_error);
    }
    out.summary["samples"] = 1000000;
    out.summary["runs"] = runs;
    out.pass = pass;
    out.detail = "tail-index estimates within " + fmt(worst * 100.0) +
                 "% (cap 15%) of 0.5 / 1 / 2 at a million samples each";
    return out;
}

Outcome criterion_11() {
    Outcome out;
    out.summary["criterion"] = 11;
    RegimeOptions opts;
    opts.steps = 100000;
    opts.replicas = 100;
    opts.checkpoint_step = 10000;

    const auto drift = regime_experiment(Weights(3, {2, 1, 1, 1, 1, 1}), kSeed, opts);
    const bool pass_drift = drift.velocity_ci_low[0] > 0.0;

    const auto symmetric = regime_experiment(Weights::uniform(3, 1.0), kSeed, opts);
    const bool pass_symmetric =
        symmetric.velocity_ci_low[0] <= 0.0 && symmetric.velocity_ci_high[0] >= 0.0;

    const auto slow = regime_experiment(Weights(3, {0.2, 0.02, 0.02, 0.02, 0.02, 0.02}), kSeed, opts);
    const double early = std::abs(slow.velocity_checkpoint[0]);
    const double late = std::abs(slow.velocity[0]);
    const bool pass_slow = late < early;

    auto arm = [](const RegimeReport& r) {
        json entry;
        entry["alpha"] = r.weights.alpha;
        entry["predicted"] = regime_name(r.predicted);
        entry["velocity_e1"] = r.velocity[0];
        entry["ci_low"] = r.velocity_ci_low[0];
        entry["ci_high"] = r.velocity_ci_high[0];
        entry["velocity_e1_checkpoint"] = r.velocity_checkpoint[0];
        entry["checkpoint_step"] = r.checkpoint_step;
        entry["range_fraction"] = r.range_fraction;
        return entry;
    };
    out.summary["steps"] = opts.steps;
    out.summary["replicas"] = opts.replicas;
    out.summary["ballistic"] = arm(drift);
    out.summary["symmetric"] = arm(symmetric);
    out.summary["zero_speed"] = arm(slow);
    out.pass = pass_drift && pass_symmetric && pass_slow;
    out.detail = "ballistic CI [" + fmt(drift.velocity_ci_low[0]) + ", " + fmt(drift.velocity_ci_high[0]) +
                 "] > 0; symmetric CI [" + fmt(symmetric.velocity_ci_low[0]) + ", " +
                 fmt(symmetric.velocity_ci_high[0]) + "] straddles 0; slow-regime speed " + fmt(early) +
                 " -> " + fmt(late) + " from 1e4 to 1e5 steps";
    return out;
}

Outcome run_criterion(int k);

Outcome criterion_12() {
    Outcome out;
    out.summary["criterion"] = 12;
    json rows = json::array();
    bool all_same = true;
    for (int k = 1; k <= 11; ++k) {
        const Outcome first = run_criterion(k);
        const Outcome second = run_criterion(k);
        const std::string a = first.summary.dump();
        const std::string b = second.summary.dump();
        const bool same = a == b && first.pass == second.pass;
        all_same = all_same && same;
        rows.push_back({{"criterion", k}, {"identical", same}, {"digest", fnv1a64_digest(a)}});
    }
    out.summary["reruns"] = rows;
    out.pass = all_same;
    out.detail = all_same ? "all 11 criterion summaries byte-identical on re-run with the same seed"
                          : "re-run produced differing summaries";
    return out;
}

Outcome run_criterion(int k) {
    switch (k) {
        case 1: return criterion_1();
        case 2: return criterion_2();
        case 3: return criterion_3();
        case 4: return criterion_4();
        case 5: return criterion_5();
        case 6: return criterion_6();
        case 7: return criterion_7();
        case 8: return criterion_8();
        case 9: return criterion_9();
        case 10: return criterion_10();
        case 11: return criterion_11();
        case 12: return criterion_12();
        default: throw std::invalid_argument("criterion index must be 1..12");
    }
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> todo;
    if (argc < 2 || std::string(argv[1]) == "all") {
        for (int k = 1; k <= 12; ++k) todo.push_back(k);
    } else {
        try {
            const int k = std::stoi(argv[1]);
            if (k < 1 || k > 12) throw std::out_of_range("range");
            todo.push_back(k);
        } catch (const std::exception&) {
            std::fprintf(stderr, "usage: %s <1..12|all>\n", argv[0]);
            return 2;
        }
    }

    json results = json::array();
    int failures = 0;
    for (int k : todo) {
        Outcome out;
        try {
            out = run_criterion(k);
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
            out.summary = {{"criterion", k}, {"exception", e.what()}};
        }
        std::printf("[%s] criterion %d: %s\n", out.pass ? "PASS" : "FAIL", k, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
        results.push_back(out.summary);
    }
    if (todo.size() > 1)
        std::printf("acceptance: %zu/%zu criteria passed\n", todo.size() - static_cast<std::size_t>(failures),
                    todo.size());
    std::printf("%s\n", results.dump(2).c_str());
    return failures == 0 ? 0 : 1;
}
