// Command-line front end: every experiment the library supports, driven by a
// versioned JSON config, with deterministic artifacts and digests.

#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rwde/rwde.hpp"

namespace fs = std::filesystem;
using rwde::json;

namespace {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void require_allowed(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw config_error(where + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) throw config_error(where + ": unknown key '" + it.key() + "'");
}

template <typename T>
T get_or(const json& j, const std::string& key, const T& fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception& e) {
        throw config_error("key '" + key + "': " + e.what());
    }
}

json weights_echo(const rwde::Weights& w) { return json{{"d", w.d}, {"alpha", w.alpha}}; }

rwde::Weights parse_weights(const json& j) {
    require_allowed(j, {"d", "alpha"}, "weights");
    rwde::Weights w;
    if (j.contains("alpha")) {
        w.alpha = get_or<std::vector<double>>(j, "alpha", {});
        w.d = get_or<int>(j, "d", static_cast<int>(w.alpha.size() / 2));
    } else {
        w.d = get_or<int>(j, "d", 3);
        if (w.d < 1) throw config_error("weights: d must be positive");
        w.alpha.assign(static_cast<std::size_t>(2 * w.d), 1.0);
    }
    try {
        w.validate();
    } catch (const std::exception& e) {
        throw config_error(std::string("weights: ") + e.what());
    }
    return w;
}

rwde::BoostedCapacity parse_capacity(const json& j, json& echo) {
    require_allowed(j, {"d", "alpha", "scale", "boost_direction", "boost"}, "capacity");
    rwde::BoostedCapacity cap;
    json weights_part;
    for (const char* key : {"d", "alpha"})
        if (j.contains(key)) weights_part[key] = j.at(key);
    cap.w = parse_weights(weights_part);
    cap.scale = get_or<double>(j, "scale", 1.0);
    if (!(cap.scale > 0.0)) throw config_error("capacity: scale must be positive");
    cap.boost_dir = get_or<int>(j, "boost_direction", -1);
    if (cap.boost_dir >= 2 * cap.w.d) throw config_error("capacity: boost_direction out of range");
    if (j.contains("boost") && j.at("boost").is_string()) {
        if (j.at("boost").get<std::string>() != "kappa")
            throw config_error("capacity: boost must be a number or \"kappa\"");
        cap.boost = rwde::kappa(cap.w);
    } else {
        cap.boost = get_or<double>(j, "boost", 0.0);
    }
    if (cap.boost < 0.0) throw config_error("capacity: boost must be nonnegative");
    if (cap.boost > 0.0 && cap.boost_dir < 0)
        throw config_error("capacity: boost requires boost_direction");
    echo = json{{"d", cap.w.d},
                {"alpha", cap.w.alpha},
                {"scale", cap.scale},
                {"boost_direction", cap.boost_dir},
                {"boost", cap.boost}};
    return cap;
}

struct RunContext {
    std::uint64_t seed = 0;
    int threads = 1;
    fs::path out;
    std::vector<rwde::ArtifactRecord>* artifacts = nullptr;

    void emit(const fs::path& file) const { artifacts->push_back(rwde::record_artifact(out, file)); }
};

json run_kappa(const json& cfg, json& effective) {
    require_allowed(cfg, {"schema_version", "weights"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    effective["weights"] = weights_echo(w);
    const rwde::Weights swapped = rwde::reversed_weights(w);
    return json{{"kappa", rwde::kappa(w)},
                {"trap_direction", rwde::trap_direction(w)},
                {"mean_drift", rwde::mean_drift(w)},
                {"drift_is_zero", rwde::drift_is_zero(w)},
                {"predicted_regime", rwde::regime_name(rwde::predicted_regime(w))},
                {"reversed_alpha", swapped.alpha}};
}

json run_sample_env(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg, {"schema_version", "weights", "N", "count"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    const int N = get_or<int>(cfg, "N", 4);
    const int count = get_or<int>(cfg, "count", 1);
    if (count < 1 || count > 10000) throw config_error("count must be in [1, 10000]");
    effective["weights"] = weights_echo(w);
    effective["N"] = N;
    effective["count"] = count;

    const rwde::TorusGraph g{w.d, N};
    for (int i = 0; i < count; ++i) {
        rwde::Rng rng = rwde::Rng::stream(ctx.seed, static_cast<std::uint64_t>(i));
        const rwde::Environment env = rwde::sample_environment(w, g, rng);
        std::ostringstream name;
        name << "env_" << std::setfill('0') << std::setw(3) << i << ".csv";
        const fs::path file = ctx.out / name.str();
        rwde::write_environment_csv(env, file.string());
        ctx.emit(file);
    }
    return json{{"count", count}, {"vertices", g.vertex_count()}, {"edges", g.edge_count()}};
}

rwde::StationaryOptions parse_stationary(const json& cfg, json& effective) {
    rwde::StationaryOptions opts;
    const std::string method = get_or<std::string>(cfg, "method", "auto");
    if (method == "auto")
        opts.method = rwde::StationaryOptions::Method::automatic;
    else if (method == "direct")
        opts.method = rwde::StationaryOptions::Method::direct;
    else if (method == "iterative")
        opts.method = rwde::StationaryOptions::Method::iterative;
    else
        throw config_error("method must be auto, direct, or iterative");
    opts.tolerance = get_or<double>(cfg, "tolerance", opts.tolerance);
    if (!(opts.tolerance > 0.0)) throw config_error("tolerance must be positive");
    effective["method"] = method;
    effective["tolerance"] = opts.tolerance;
    return opts;
}

json run_stationary(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg, {"schema_version", "weights", "N", "method", "tolerance"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    const int N = get_or<int>(cfg, "N", 4);
    effective["weights"] = weights_echo(w);
    effective["N"] = N;
    const rwde::StationaryOptions opts = parse_stationary(cfg, effective);

    const rwde::TorusGraph g{w.d, N};
    rwde::Rng rng = rwde::Rng::stream(ctx.seed, 0);
    const rwde::Environment env = rwde::sample_environment(w, g, rng);
    const rwde::StationarySolution sol = rwde::stationary_distribution(env, opts);

    const fs::path env_file = ctx.out / "environment.csv";
    rwde::write_environment_csv(env, env_file.string());
    ctx.emit(env_file);
    const fs::path pi_file = ctx.out / "stationary.csv";
    rwde::write_samples_csv(pi_file, sol.pi.values, "probability");
    ctx.emit(pi_file);

    json res = sol;
    res["N"] = N;
    return res;
}

json run_reverse_check(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg, {"schema_version", "weights", "N", "replicas"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    const int N = get_or<int>(cfg, "N", 3);
    const auto replicas = get_or<std::uint64_t>(cfg, "replicas", 2000);
    effective["weights"] = weights_echo(w);
    effective["N"] = N;
    effective["replicas"] = replicas;

    rwde::ReversalLawOptions opts;
    opts.replicas = replicas;
    const std::vector<rwde::ReversalLawReport> reports = rwde::reversal_law_test(w, N, ctx.seed, opts);

    // spot check of the exact quotient identity on one environment with a
    // random edge field
    const rwde::TorusGraph g{w.d, N};
    rwde::Rng env_rng = rwde::Rng::stream(ctx.seed, std::uint64_t{1} << 42);
    const rwde::Environment env = rwde::sample_environment(w, g, env_rng);
    const rwde::StationarySolution sol = rwde::stationary_distribution(env);
    rwde::Rng theta_rng = rwde::Rng::stream(ctx.seed, (std::uint64_t{1} << 42) + 1);
    rwde::EdgeField theta(g, 0.0);
    for (double& v : theta.values) v = 2.0 * theta_rng.uniform() - 1.0;
    const rwde::ReversalIdentity identity = rwde::reversal_identity_check(env, sol, theta);

    return json{{"reports", reports},
                {"identity_check", json{{"lhs", identity.lhs},
                                        {"rhs", identity.rhs},
                                        {"abs_error", identity.abs_error},
                                        {"rel_error", identity.rel_error}}}};
}

json run_moments(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg, {"schema_version", "weights", "p", "sizes", "replicas", "bootstrap_resamples"},
                    "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    rwde::MomentOptions opts;
    opts.p = get_or<double>(cfg, "p", opts.p);
    opts.replicas = get_or<std::uint64_t>(cfg, "replicas", opts.replicas);
    opts.bootstrap_resamples = get_or<std::uint64_t>(cfg, "bootstrap_resamples", opts.bootstrap_resamples);
    const auto sizes = get_or<std::vector<int>>(cfg, "sizes", {4, 6, 8});
    if (sizes.empty()) throw config_error("sizes must be nonempty");
    if (opts.replicas < 2) throw config_error("replicas must be at least 2");
    effective["weights"] = weights_echo(w);
    effective["p"] = opts.p;
    effective["sizes"] = sizes;
    effective["replicas"] = opts.replicas;
    effective["bootstrap_resamples"] = opts.bootstrap_resamples;

    opts.keep_replica_values = true;
    std::vector<rwde::MomentEstimate> estimates;
    estimates.reserve(sizes.size());
    for (std::size_t i = 0; i < sizes.size(); ++i)
        estimates.push_back(rwde::moment_experiment(w, sizes[i], i, ctx.seed, opts));

    std::ostringstream csv;
    csv << "N,p,replicas,solver_failures,mean,ci_low,ci_high,mean_density\n";
    for (const auto& est : estimates)
        csv << est.N << "," << rwde::format_double(est.p) << "," << est.replicas << ","
            << est.solver_failures << "," << rwde::format_double(est.mean) << ","
            << rwde::format_double(est.ci_low) << "," << rwde::format_double(est.ci_high) << ","
            << rwde::format_double(est.mean_density) << "\n";
    const fs::path csv_file = ctx.out / "moments.csv";
    rwde::write_file_bytes(csv_file, csv.str());
    ctx.emit(csv_file);

    std::ostringstream rows;
    rows << "seed,N,p,f_N,residual\n";
    for (const auto& est : estimates)
        for (std::size_t r = 0; r < est.replica_density.size(); ++r)
            rows << est.replica_streams[r] << "," << est.N << "," << rwde::format_double(est.p) << ","
                 << rwde::format_double(est.replica_density[r]) << ","
                 << rwde::format_double(est.replica_residual[r]) << "\n";
    const fs::path rows_file = ctx.out / "replicas.csv";
    rwde::write_file_bytes(rows_file, rows.str());
    ctx.emit(rows_file);

    std::vector<double> ratios;
    for (std::size_t i = 1; i < estimates.size(); ++i)
        ratios.push_back(estimates[i].mean / estimates[i - 1].mean);
    double lo = estimates.front().mean, hi = lo;
    for (const auto& est : estimates) {
        lo = std::min(lo, est.mean);
        hi = std::max(hi, est.mean);
    }
    return json{{"estimates", estimates}, {"growth_ratios", ratios}, {"max_over_min", hi / lo}};
}

json run_flow(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg,
                    {"schema_version", "capacity", "N", "strength", "samples", "cap_lower", "cap_upper",
                     "strict_size_guard"},
                    "config");
    json cap_echo;
    const rwde::BoostedCapacity cap = parse_capacity(cfg.value("capacity", json::object()), cap_echo);
    const int N = get_or<int>(cfg, "N", 8);
    const double strength = get_or<double>(cfg, "strength", 1.0);
    rwde::ThetaOptions opts;
    opts.unit_flow_samples = get_or<int>(cfg, "samples", opts.unit_flow_samples);
    opts.cap_lower = get_or<double>(cfg, "cap_lower", 0.0);
    opts.cap_upper = get_or<double>(cfg, "cap_upper", 0.0);
    opts.strict_size_guard = get_or<bool>(cfg, "strict_size_guard", false);
    opts.threads = ctx.threads;
    if (opts.unit_flow_samples < 1) throw config_error("samples must be positive");
    effective["capacity"] = cap_echo;
    effective["N"] = N;
    effective["strength"] = strength;
    effective["samples"] = opts.unit_flow_samples;
    effective["cap_lower"] = opts.cap_lower;
    effective["cap_upper"] = opts.cap_upper;
    effective["strict_size_guard"] = opts.strict_size_guard;

    const rwde::TorusGraph g{cap.w.d, N};
    const rwde::EdgeField capacities = rwde::capacity_field(g, cap);
    const rwde::FlowConstructionTrace trace = rwde::construct_theta_n(g, capacities, strength, ctx.seed, opts);

    const fs::path theta_file = ctx.out / "theta.csv";
    rwde::write_edge_field_csv(theta_file, trace.theta, "flow");
    ctx.emit(theta_file);
    const fs::path tilde_file = ctx.out / "theta_tilde.csv";
    rwde::write_edge_field_csv(tilde_file, trace.theta_tilde, "flow");
    ctx.emit(tilde_file);

    json res = trace;
    res["N"] = N;
    return res;
}

json run_mincut(const json& cfg, json& effective) {
    require_allowed(cfg, {"schema_version", "capacity", "radii"}, "config");
    json cap_echo;
    const rwde::BoostedCapacity cap = parse_capacity(cfg.value("capacity", json::object()), cap_echo);
    const auto radii = get_or<std::vector<int>>(cfg, "radii", {2, 3});
    if (radii.empty()) throw config_error("radii must be nonempty");
    effective["capacity"] = cap_echo;
    effective["radii"] = radii;

    json values = json::array();
    for (int r : radii)
        values.push_back(json{{"radius", r}, {"min_cut", rwde::min_cut_truncated_lattice(cap, r)}});
    return json{{"values", values}, {"kappa", rwde::kappa(cap.w)}};
}

json run_walk(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg,
                    {"schema_version", "weights", "steps", "replicas", "environment_size",
                     "checkpoint_step", "bootstrap_resamples"},
                    "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    rwde::RegimeOptions opts;
    opts.steps = get_or<std::int64_t>(cfg, "steps", opts.steps);
    opts.replicas = get_or<std::uint64_t>(cfg, "replicas", opts.replicas);
    opts.environment_size = get_or<int>(cfg, "environment_size", opts.environment_size);
    opts.checkpoint_step = get_or<std::int64_t>(cfg, "checkpoint_step", 0);
    opts.bootstrap_resamples = get_or<std::uint64_t>(cfg, "bootstrap_resamples", opts.bootstrap_resamples);
    effective["weights"] = weights_echo(w);
    effective["steps"] = opts.steps;
    effective["replicas"] = opts.replicas;
    effective["environment_size"] = opts.environment_size;
    effective["checkpoint_step"] = opts.checkpoint_step;
    effective["bootstrap_resamples"] = opts.bootstrap_resamples;

    const rwde::RegimeReport report = rwde::regime_experiment(w, ctx.seed, opts);
    return json(report);
}

json run_trap_tail(const json& cfg, json& effective, const RunContext& ctx) {
    require_allowed(cfg, {"schema_version", "weights", "samples", "hill_k"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    const auto samples = get_or<std::uint64_t>(cfg, "samples", 1000000);
    const auto hill_k = get_or<std::uint64_t>(cfg, "hill_k", 0);
    if (samples < 100) throw config_error("samples must be at least 100");
    effective["weights"] = weights_echo(w);
    effective["samples"] = samples;
    effective["hill_k"] = hill_k;

    rwde::Rng rng = rwde::Rng::stream(ctx.seed, 0);
    const rwde::TrapTailReport report = rwde::trap_tail_experiment(w, samples, rng, hill_k);

    std::ostringstream csv;
    csv << "k,estimate\n";
    for (const auto& [k, est] : report.hill.sensitivity)
        csv << k << "," << rwde::format_double(est) << "\n";
    const fs::path csv_file = ctx.out / "hill_sensitivity.csv";
    rwde::write_file_bytes(csv_file, csv.str());
    ctx.emit(csv_file);

    return json(report);
}

json run_annealed_check(const json& cfg, json& effective) {
    require_allowed(cfg, {"schema_version", "weights", "max_length"}, "config");
    const rwde::Weights w = parse_weights(cfg.value("weights", json::object()));
    const int max_length = get_or<int>(cfg, "max_length", 4);
    effective["weights"] = weights_echo(w);
    effective["max_length"] = max_length;

    const rwde::AnnealedConsistency check = rwde::annealed_consistency_check(w, max_length);
    double worst_sum_dev = 0.0;
    for (double s : check.probability_sums) worst_sum_dev = std::max(worst_sum_dev, std::abs(s - 1.0));
    json res = check;
    res["max_sum_deviation"] = worst_sum_dev;
    return res;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"verification laboratory for random walks in random Dirichlet environments"};
    app.fallthrough();
    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 123456789ULL;
    int threads = 1;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "master seed for all randomness");
    app.add_option("--out", out_dir, "output directory for artifacts");
    app.add_option("--threads", threads, "worker threads for flow aggregation");
    app.require_subcommand(1);

    const std::vector<std::pair<std::string, std::string>> subs = {
        {"kappa", "tail exponent, drift and predicted regime for given weights"},
        {"sample-env", "draw environments on a torus and write them as CSV"},
        {"stationary", "solve the stationary law of one sampled environment"},
        {"reverse-check", "distributional checks for the time-reversed environment"},
        {"moments", "Monte Carlo moments of the stationary origin density across torus sizes"},
        {"flow", "construct a capacity-dominated flow from the origin to the uniform measure"},
        {"mincut", "min-cut values of truncated-lattice capacity problems"},
        {"walk", "velocity and range statistics of the quenched walk"},
        {"trap-tail", "tail-index estimate for the two-site trap Green function"},
        {"annealed-check", "cross-validate the two formulas for averaged path probabilities"}};
    for (const auto& [name, desc] : subs) app.add_subcommand(name, desc)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        json cfg = json::object();
        if (!config_path.empty()) {
            std::string raw;
            try {
                raw = rwde::read_file_bytes(config_path);
            } catch (const std::runtime_error& e) {
                throw config_error(e.what());
            }
            cfg = json::parse(raw);
            if (!cfg.is_object()) throw config_error("config root must be a JSON object");
            if (cfg.contains("schema_version")) {
                if (!cfg.at("schema_version").is_number_integer() ||
                    cfg.at("schema_version").get<int>() != 1)
                    throw config_error("unsupported schema_version (expected 1)");
            }
        }
        if (threads < 1 || threads > 256) throw config_error("--threads must be in [1, 256]");

        const fs::path out(out_dir);
        fs::create_directories(out);
        std::vector<rwde::ArtifactRecord> artifacts;
        RunContext ctx{seed, threads, out, &artifacts};

        std::string sub;
        for (const auto* s : app.get_subcommands()) sub = s->get_name();

        json effective;
        effective["schema_version"] = 1;
        json results;
        if (sub == "kappa")
            results = run_kappa(cfg, effective);
        else if (sub == "sample-env")
            results = run_sample_env(cfg, effective, ctx);
        else if (sub == "stationary")
            results = run_stationary(cfg, effective, ctx);
        else if (sub == "reverse-check")
            results = run_reverse_check(cfg, effective, ctx);
        else if (sub == "moments")
            results = run_moments(cfg, effective, ctx);
        else if (sub == "flow")
            results = run_flow(cfg, effective, ctx);
        else if (sub == "mincut")
            results = run_mincut(cfg, effective);
        else if (sub == "walk")
            results = run_walk(cfg, effective, ctx);
        else if (sub == "trap-tail")
            results = run_trap_tail(cfg, effective, ctx);
        else if (sub == "annealed-check")
            results = run_annealed_check(cfg, effective);
        else
            throw config_error("unknown subcommand");

        json summary;
        summary["schema_version"] = 1;
        summary["tool"] = "rwde";
        summary["version"] = "1.0.0";
        summary["subcommand"] = sub;
        summary["seed"] = seed;
        summary["threads"] = threads;
        summary["config"] = effective;
        summary["results"] = results;
        summary["artifacts"] = artifacts;
        summary["generated_at"] = utc_timestamp();
        const std::string bytes = summary.dump(2) + "\n";
        rwde::write_file_bytes(out / "summary.json", bytes);
        std::cout << bytes;
        return 0;
    } catch (const rwde::invariant_violation& e) {
        std::cerr << "invariant violation: " << e.what() << "\n";
        return 4;
    } catch (const rwde::numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::logic_error& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
