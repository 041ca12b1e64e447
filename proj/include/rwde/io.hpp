#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rwde/experiments.hpp"
#include "rwde/flow_constructor.hpp"
#include "rwde/stationary.hpp"
#include "rwde/stats.hpp"
#include "rwde/torus.hpp"
#include "rwde/walk.hpp"
#include "rwde/weights.hpp"

namespace rwde {

//! FNV-1a over the raw bytes; stable across platforms, good enough to detect
//! any accidental nondeterminism in emitted artifacts.
inline std::string fnv1a64_digest(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= static_cast<std::uint64_t>(c);
        h *= 0x00000100000001b3ULL;
    }
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << std::setfill('0') << std::setw(16) << h;
    return out.str();
}

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_file_bytes(const std::filesystem::path& path, std::string_view bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path.string());
}

using json = nlohmann::ordered_json;

inline void to_json(json& j, const Weights& w) {
    j = json{{"d", w.d}, {"alpha", w.alpha}};
}

inline void to_json(json& j, const GoodnessOfFit& g) {
    j = json{{"n", g.n}, {"statistic", g.statistic}, {"p_value", g.p_value}, {"null", g.null_description}};
}

inline void to_json(json& j, const TailIndexReport& r) {
    json sweep = json::array();
    for (const auto& [k, est] : r.sensitivity) sweep.push_back(json{{"k", k}, {"estimate", est}});
    j = json{{"n", r.n},           {"k", r.k},
             {"estimate", r.estimate}, {"ci_low", r.ci_low},
             {"ci_high", r.ci_high},   {"sensitivity", std::move(sweep)}};
}

inline void to_json(json& j, const TrapTailReport& r) {
    j = json{{"samples", r.samples},
             {"kappa_theory", r.kappa_theory},
             {"hill", r.hill},
             {"relative_error", r.relative_error},
             {"out_of_regime", r.out_of_regime},
             {"note", r.note}};
}

inline void to_json(json& j, const MomentEstimate& m) {
    j = json{{"N", m.N},
             {"p", m.p},
             {"replicas", m.replicas},
             {"solver_failures", m.solver_failures},
             {"mean", m.mean},
             {"ci_low", m.ci_low},
             {"ci_high", m.ci_high},
             {"mean_density", m.mean_density},
             {"seed", m.seed}};
}

inline void to_json(json& j, const ReversalLawReport& r) {
    j = json{{"direction", r.direction},
             {"beta_a", r.beta_a},
             {"beta_b", r.beta_b},
             {"reversed_fit", r.reversed_fit},
             {"wrong_null", r.wrong_null}};
}

inline void to_json(json& j, const RegimeReport& r) {
    j = json{{"weights", r.weights},
             {"predicted_regime", regime_name(r.predicted)},
             {"steps", r.steps},
             {"replicas", r.replicas},
             {"velocity", r.velocity},
             {"velocity_ci_low", r.velocity_ci_low},
             {"velocity_ci_high", r.velocity_ci_high},
             {"velocity_checkpoint", r.velocity_checkpoint},
             {"drift_direction", r.drift_direction},
             {"sign_agreement", r.sign_agreement},
             {"range_fraction", r.range_fraction},
             {"range_fraction_ci_low", r.range_fraction_ci_low},
             {"range_fraction_ci_high", r.range_fraction_ci_high},
             {"range_fraction_checkpoint", r.range_fraction_checkpoint},
             {"checkpoint_step", r.checkpoint_step},
             {"checkpoint_speed", r.checkpoint_speed},
             {"final_speed", r.final_speed}};
}

inline void to_json(json& j, const RangeFractionPoint& p) {
    j = json{{"steps", p.steps}, {"fraction", p.fraction}, {"ci_low", p.ci_low}, {"ci_high", p.ci_high}};
}

inline void to_json(json& j, const AnnealedConsistency& c) {
    j = json{{"max_length", c.max_length},
             {"paths_checked", c.paths_checked},
             {"max_relative_error", c.max_relative_error},
             {"probability_sums", c.probability_sums}};
}

inline void to_json(json& j, const StationarySolution& s) {
    j = json{{"residual", s.residual},
             {"iterations", s.iterations},
             {"method", s.method},
             {"min_entry", s.min_entry},
             {"density_f", density_f(s)}};
}

inline void to_json(json& j, const FlowConstructionTrace& t) {
    j = json{{"strength", t.strength},
             {"cap_lower", t.cap_lower},
             {"cap_upper", t.cap_upper},
             {"eta0", t.eta0},
             {"eta1_nominal", t.eta1_nominal},
             {"eta1_used", t.eta1_used},
             {"n0", t.n0},
             {"n0_satisfied", t.n0_satisfied},
             {"feasibility_attempts", t.feasibility_attempts},
             {"divergence_error", t.divergence_error},
             {"l2_theta_tilde", t.l2_theta_tilde},
             {"l2_theta", t.l2_theta},
             {"l2_bound", t.l2_bound},
             {"dominated", t.dominated}};
}

//! Shortest-roundtrip decimal for a double (what nlohmann emits as well);
//! used by the CSV writers so text artifacts reparse to the same bits.
inline std::string format_double(double x) {
    std::ostringstream out;
    out << std::setprecision(17) << x;
    double check = 0.0;
    for (int prec = 15; prec <= 17; ++prec) {
        std::ostringstream trial;
        trial << std::setprecision(prec) << x;
        std::istringstream(trial.str()) >> check;
        if (check == x) return trial.str();
    }
    return out.str();
}

inline void write_edge_field_csv(const std::filesystem::path& path, const EdgeField& field,
                                 const std::string& value_name = "value") {
    std::ostringstream out;
    out << "edge_index," << value_name << "\n";
    for (std::size_t e = 0; e < field.values.size(); ++e)
        out << e << "," << format_double(field.values[e]) << "\n";
    write_file_bytes(path, out.str());
}

inline void write_samples_csv(const std::filesystem::path& path, std::span<const double> samples,
                              const std::string& value_name = "value") {
    std::ostringstream out;
    out << "index," << value_name << "\n";
    for (std::size_t i = 0; i < samples.size(); ++i)
        out << i << "," << format_double(samples[i]) << "\n";
    write_file_bytes(path, out.str());
}

struct ArtifactRecord {
    std::string path;
    std::uint64_t bytes = 0;
    std::string digest;
};

inline void to_json(json& j, const ArtifactRecord& a) {
    j = json{{"path", a.path}, {"bytes", a.bytes}, {"digest", a.digest}};
}

inline ArtifactRecord record_artifact(const std::filesystem::path& root, const std::filesystem::path& file) {
    const std::string bytes = read_file_bytes(file);
    ArtifactRecord rec;
    rec.path = std::filesystem::relative(file, root).generic_string();
    rec.bytes = bytes.size();
    rec.digest = fnv1a64_digest(bytes);
    return rec;
}

}  // namespace rwde
