#pragma once

#include <cstdint>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "tmodes/dynamics.hpp"
#include "tmodes/errors.hpp"
#include "tmodes/polynomial.hpp"
#include "tmodes/quartic.hpp"
#include "tmodes/spectra.hpp"

namespace tmodes {
namespace io {

/// Fixed round-trippable formatting so identical runs produce identical bytes.
inline std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

inline std::string tri_to_string(TriState t) {
    switch (t) {
        case TriState::True: return "true";
        case TriState::False: return "false";
        default: return "inapplicable";
    }
}

inline std::string kind_to_string(CriticalKind k) {
    switch (k) {
        case CriticalKind::Minimum: return "minimum";
        case CriticalKind::Maximum: return "maximum";
        case CriticalKind::Saddle: return "saddle";
        default: return "degenerate";
    }
}

inline std::string angle_kind_to_string(AngleKind k) {
    switch (k) {
        case AngleKind::Stable: return "stable";
        case AngleKind::Unstable: return "unstable";
        default: return "degenerate";
    }
}

inline std::string verdict_to_string(OffsetVerdict v) {
    switch (v) {
        case OffsetVerdict::Stable: return "stable";
        case OffsetVerdict::Unstable: return "unstable";
        default: return "inconclusive";
    }
}

// ---------------------------------------------------------------------------
// Polynomial file format: {"dim": m, "degree": n,
//   "terms": [{"monomial": [e_1, ..., e_m], "coeff": c}, ...]}
// Duplicate monomials are summed; every monomial must have degree n.
// ---------------------------------------------------------------------------

inline HomogeneousPolynomial polynomial_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw input_error("tensor file: top level must be a JSON object");
    for (const char* field : {"dim", "degree", "terms"}) {
        if (!j.contains(field)) throw input_error(std::string("tensor file: missing field \"") + field + "\"");
    }
    if (!j["dim"].is_number_integer()) throw input_error("tensor file: \"dim\" must be an integer");
    if (!j["degree"].is_number_integer()) throw input_error("tensor file: \"degree\" must be an integer");
    if (!j["terms"].is_array()) throw input_error("tensor file: \"terms\" must be an array");
    const int dim = j["dim"].get<int>();
    const int degree = j["degree"].get<int>();
    std::vector<std::pair<Monomial, double>> terms;
    int k = 0;
    for (const auto& t : j["terms"]) {
        std::string where = "terms[" + std::to_string(k) + "]";
        if (!t.is_object() || !t.contains("monomial") || !t.contains("coeff"))
            throw input_error("tensor file: " + where + " must be {\"monomial\": [...], \"coeff\": number}");
        if (!t["monomial"].is_array())
            throw input_error("tensor file: " + where + ".monomial must be an array of integers");
        if (!t["coeff"].is_number())
            throw input_error("tensor file: " + where + ".coeff must be a number");
        Monomial mono;
        for (const auto& e : t["monomial"]) {
            if (!e.is_number_integer())
                throw input_error("tensor file: " + where + ".monomial entries must be integers");
            mono.push_back(e.get<int>());
        }
        terms.emplace_back(std::move(mono), t["coeff"].get<double>());
        ++k;
    }
    return HomogeneousPolynomial::from_terms(dim, degree, terms);
}

inline HomogeneousPolynomial read_polynomial_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open tensor file: " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw input_error("tensor file " + path + ": " + e.what());
    }
    return polynomial_from_json(j);
}

inline nlohmann::json polynomial_to_json(const HomogeneousPolynomial& poly) {
    nlohmann::json j;
    j["dim"] = poly.dim();
    j["degree"] = poly.degree();
    j["terms"] = nlohmann::json::array();
    for (const auto& [mono, coeff] : poly.terms()) {
        j["terms"].push_back({{"monomial", mono}, {"coeff", coeff}});
    }
    return j;
}

// ---------------------------------------------------------------------------
// Spectrum report
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const SpectrumReport& report, const HomogeneousPolynomial& poly) {
    nlohmann::json j;
    j["dim"] = poly.dim();
    j["degree"] = poly.degree();
    j["degenerate_family"] = report.degenerate_family;
    j["bezout_bound"] = report.bezout_bound ? nlohmann::json(*report.bezout_bound) : nlohmann::json();
    j["real_count"] = report.real_count;
    j["eigenspace_count"] = report.eigenspace_count;
    j["parity_ok"] = tri_to_string(report.parity_ok);
    j["chi"] = report.chi;
    j["index_sum"] = report.index_sum ? nlohmann::json(*report.index_sum) : nlohmann::json();
    j["index_sum_ok"] = tri_to_string(report.index_sum_ok);
    j["eigenpairs"] = nlohmann::json::array();
    for (const auto& e : report.eigenpairs) {
        nlohmann::json p;
        p["v"] = std::vector<double>(e.v.data(), e.v.data() + e.v.size());
        p["lambda"] = e.lambda;
        p["residual"] = e.residual;
        p["multiplicity_one"] = tri_to_string(e.multiplicity_one);
        p["kind"] = kind_to_string(e.classification.kind);
        if (e.classification.kind == CriticalKind::Saddle)
            p["saddle_index"] = e.classification.saddle_index;
        p["morse_index"] = e.classification.morse_index;
        p["ph_index"] = e.classification.ph_index ? nlohmann::json(*e.classification.ph_index)
                                                  : nlohmann::json();
        j["eigenpairs"].push_back(std::move(p));
    }
    return j;
}

inline std::string report_to_csv(const SpectrumReport& report, int dim) {
    std::ostringstream out;
    for (int i = 1; i <= dim; ++i) out << "v" << i << ",";
    out << "lambda,kind,morse_index,ph_index\n";
    for (const auto& e : report.eigenpairs) {
        for (int i = 0; i < dim; ++i) out << num(e.v[i]) << ",";
        out << num(e.lambda) << "," << kind_to_string(e.classification.kind) << ","
            << e.classification.morse_index << ",";
        if (e.classification.ph_index) out << *e.classification.ph_index;
        out << "\n";
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Trajectories and case-study outputs
// ---------------------------------------------------------------------------

inline std::string trajectory_to_csv(const SecondOrderSystem& sys, const Trajectory& traj, int stride = 1) {
    if (stride < 1) throw input_error("stride must be >= 1");
    const int m = sys.potential.dim();
    std::ostringstream out;
    out << "t";
    for (int i = 1; i <= m; ++i) out << ",q" << i;
    for (int i = 1; i <= m; ++i) out << ",v" << i;
    out << ",energy\n";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        if (k % stride != 0 && k + 1 != traj.samples.size()) continue;
        const auto& s = traj.samples[k];
        out << num(s.t);
        for (int i = 0; i < m; ++i) out << "," << num(s.q[i]);
        for (int i = 0; i < m; ++i) out << "," << num(s.v[i]);
        out << "," << num(energy(sys, s)) << "\n";
    }
    return out.str();
}

inline std::string scalar_to_csv(const ReducedMode& mode, const ScalarTrajectory& traj, int stride = 1) {
    if (stride < 1) throw input_error("stride must be >= 1");
    std::ostringstream out;
    out << "t,gamma,gammadot,psi\n";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        if (k % stride != 0 && k + 1 != traj.samples.size()) continue;
        const auto& s = traj.samples[k];
        out << num(s.t) << "," << num(s.gamma) << "," << num(s.gammadot) << ","
            << num(psi(mode, s.gamma, s.gammadot)) << "\n";
    }
    return out.str();
}

inline std::string profile_to_csv(const AngularProfile& profile, bool theta_in_pi_units = false) {
    std::ostringstream out;
    out << "theta,W\n";
    for (std::size_t i = 0; i < profile.thetas.size(); ++i) {
        double th = theta_in_pi_units ? profile.thetas[i] / M_PI : profile.thetas[i];
        out << num(th) << "," << num(profile.values[i]) << "\n";
    }
    return out.str();
}

inline std::string modeset_to_csv(const ModeSet& set, bool theta_in_pi_units = false) {
    std::ostringstream out;
    out << "theta,d2W,kind,c_theta\n";
    for (const auto& a : set.angles) {
        double th = theta_in_pi_units ? a.theta / M_PI : a.theta;
        out << num(th) << "," << num(a.second_deriv) << "," << angle_kind_to_string(a.kind) << ","
            << num(a.c_coeff) << "\n";
    }
    return out.str();
}

inline std::string scan_to_csv(const BifurcationScan& scan) {
    std::ostringstream out;
    out << "beta,count,angles\n";
    for (const auto& row : scan.rows) {
        out << num(row.beta) << "," << row.count;
        for (double a : row.angles) out << "," << num(a);
        out << "\n";
    }
    return out.str();
}

inline nlohmann::json offset_to_json(const QuarticFamily& family, double theta0, double offset,
                                     double t_end, const OffsetResult& result) {
    nlohmann::json j;
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        j["family"] = "higher";
        j["beta"] = h->beta;
    } else {
        const auto& l = std::get<LowerSymmetry>(family);
        j["family"] = "lower";
        j["alpha"] = l.alpha;
        j["beta"] = l.beta;
    }
    j["theta0"] = theta0;
    j["offset"] = offset;
    j["t_end"] = t_end;
    j["verdict"] = verdict_to_string(result.verdict);
    j["max_deviation"] = result.max_deviation;
    j["containment_threshold"] = result.containment_threshold;
    j["escape_threshold"] = result.escape_threshold;
    return j;
}

// ---------------------------------------------------------------------------
// Run manifest
// ---------------------------------------------------------------------------

inline std::string fnv1a64_hex(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

struct RunManifest {
    std::string tool = "tmodes";
    std::string version;
    std::string command;
    std::map<std::string, std::string> flags;
    std::string input_digest;   // fnv1a64 of the input file, or of the flag set
    std::string timestamp;      // UTC ISO-8601
};

inline std::string utc_timestamp_now() {
    std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["tool"] = m.tool;
    j["version"] = m.version;
    j["command"] = m.command;
    j["flags"] = m.flags;
    j["input_digest"] = m.input_digest;
    j["timestamp"] = m.timestamp;
    return j;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw input_error("cannot open output file: " + path);
    out << content;
    if (!out) throw input_error("failed writing output file: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace io
} // namespace tmodes
