// Command-line front end: every analysis as a subcommand with file-based,
// deterministic inputs and outputs. Exit codes: 0 success, 1 input error,
// 2 degenerate family, 3 trajectory blow-up.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "tmodes/tmodes.hpp"
#include "tmodes/version.hpp"

namespace {

using namespace tmodes;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitDegenerate = 2;
constexpr int kExitBlowup = 3;

Eigen::VectorXd parse_vector(const std::string& text, int expected_dim, const std::string& flag) {
    std::vector<double> vals;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            vals.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw input_error(flag + ": cannot parse \"" + item + "\" as a number");
        }
    }
    if (expected_dim > 0 && static_cast<int>(vals.size()) != expected_dim) {
        throw input_error(flag + ": expected " + std::to_string(expected_dim) + " components, got " +
                          std::to_string(vals.size()));
    }
    Eigen::VectorXd v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v[i] = vals[i];
    return v;
}

struct BetaRange {
    double lo = 0, hi = 0, step = 0;
};

BetaRange parse_beta_range(const std::string& text) {
    BetaRange r;
    std::stringstream ss(text);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':')) {
        // single point
        try {
            r.lo = r.hi = std::stod(text);
            r.step = 1.0;
            return r;
        } catch (const std::exception&) {
            throw input_error("--beta-range: expected lo:hi:step or a single value");
        }
    }
    std::getline(ss, c, ':');
    try {
        r.lo = std::stod(a);
        r.hi = std::stod(b);
        r.step = c.empty() ? (r.hi - r.lo) : std::stod(c);
    } catch (const std::exception&) {
        throw input_error("--beta-range: expected lo:hi:step with numeric fields");
    }
    if (r.hi == r.lo) r.step = 1.0;
    return r;
}

void write_manifest(const std::string& path, const std::string& command,
                    const std::map<std::string, std::string>& flags, const std::string& digest) {
    io::RunManifest m;
    m.version = kVersion;
    m.command = command;
    m.flags = flags;
    m.input_digest = digest;
    m.timestamp = io::utc_timestamp_now();
    io::write_text_file(path, io::manifest_to_json(m).dump(2) + "\n");
}

std::string flags_digest(const std::map<std::string, std::string>& flags) {
    std::string all;
    for (const auto& [k, v] : flags) all += k + "=" + v + ";";
    return io::fnv1a64_hex(all);
}

QuarticFamily family_from_flags(const std::string& family, double alpha, double beta) {
    if (family == "higher") return HigherSymmetry{beta};
    if (family == "lower") return LowerSymmetry{alpha, beta};
    throw input_error("--family must be \"higher\" or \"lower\"");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tensor eigenvector modes: spherical critical points and invariant-line dynamics"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    std::uint64_t seed = 0;
    double tol = 1e-10;
    std::string out;
    std::string format = "csv";
    app.add_option("--seed", seed, "seed for optional random starts");
    app.add_option("--tol", tol, "residual tolerance")->capture_default_str();
    app.add_option("--out", out, "output path (base name for eigs)");
    app.add_option("--format", format, "output format where applicable")
        ->check(CLI::IsMember({"csv", "json"}));

    // eigs
    auto* eigs = app.add_subcommand("eigs", "find all unit eigenpairs of a tensor file");
    std::string eigs_file;
    int starts = 0, random_starts = 0;
    double dedup_tol = 1e-6;
    eigs->add_option("tensor", eigs_file, "tensor/polynomial JSON file")->required();
    eigs->add_option("--starts", starts, "number of deterministic start points (0 = auto)");
    eigs->add_option("--dedup-tol", dedup_tol, "angular deduplication tolerance")->capture_default_str();
    eigs->add_option("--random-starts", random_starts, "extra seeded random starts");
    eigs->fallthrough();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "integrate q'' = -grad V from given initial data");
    std::string sim_file, q0_text, v0_text;
    double sim_dt = 1e-3, sim_tend = 10.0, mass = 1.0;
    int stride = 1;
    simulate->add_option("tensor", sim_file, "tensor/polynomial JSON file")->required();
    simulate->add_option("--q0", q0_text, "initial position, comma separated")->required();
    simulate->add_option("--v0", v0_text, "initial velocity, comma separated")->required();
    simulate->add_option("--dt", sim_dt, "time step")->capture_default_str();
    simulate->add_option("--t-end", sim_tend, "final time")->capture_default_str();
    simulate->add_option("--stride", stride, "output every K-th sample")->capture_default_str();
    simulate->add_option("--mass", mass, "particle mass")->capture_default_str();
    simulate->fallthrough();

    // restrict
    auto* restrict_cmd = app.add_subcommand("restrict", "angular profile W(theta) of a quartic family");
    std::string family = "higher", theta_units = "rad", modes_out;
    double alpha = 0.25, beta = 1.0;
    int samples = 720;
    restrict_cmd->add_option("--family", family, "higher|lower")->check(CLI::IsMember({"higher", "lower"}));
    restrict_cmd->add_option("--alpha", alpha, "lower-symmetry alpha")->capture_default_str();
    restrict_cmd->add_option("--beta", beta, "family beta")->capture_default_str();
    restrict_cmd->add_option("--samples", samples, "grid size (>= 8)")->capture_default_str();
    restrict_cmd->add_option("--theta-units", theta_units, "rad|pi")->check(CLI::IsMember({"rad", "pi"}));
    restrict_cmd->add_option("--modes-out", modes_out, "also write the critical-angle table here");
    restrict_cmd->fallthrough();

    // scan
    auto* scan_cmd = app.add_subcommand("scan", "bifurcation scan of the lower-symmetry family over beta");
    std::string range_text;
    double scan_alpha = 0.25;
    scan_cmd->add_option("--alpha", scan_alpha, "family alpha")->capture_default_str();
    scan_cmd->add_option("--beta-range", range_text, "lo:hi:step or a single beta")->required();
    scan_cmd->fallthrough();

    // check
    auto* check_cmd = app.add_subcommand("check", "counting diagnostics for a tensor file");
    std::string check_file;
    int check_starts = 0;
    check_cmd->add_option("tensor", check_file, "tensor/polynomial JSON file")->required();
    check_cmd->add_option("--starts", check_starts, "number of start points (0 = auto)");
    check_cmd->fallthrough();

    // mode
    auto* mode_cmd = app.add_subcommand("mode", "scalar mode dynamics gamma'' = alpha gamma^p");
    double mode_alpha = -4.0, y1 = 1.0, y2 = 0.0, mode_dt = 1e-4, mode_tend = 10.0;
    int p_exp = 3, mode_stride = 1;
    mode_cmd->add_option("--alpha", mode_alpha, "coefficient alpha")->capture_default_str();
    mode_cmd->add_option("--p", p_exp, "exponent p")->capture_default_str();
    mode_cmd->add_option("--y1", y1, "initial gamma")->capture_default_str();
    mode_cmd->add_option("--y2", y2, "initial gammadot")->capture_default_str();
    mode_cmd->add_option("--dt", mode_dt, "time step")->capture_default_str();
    mode_cmd->add_option("--t-end", mode_tend, "final time")->capture_default_str();
    mode_cmd->add_option("--stride", mode_stride, "output every K-th sample")->capture_default_str();
    mode_cmd->fallthrough();

    // offset
    auto* offset_cmd = app.add_subcommand("offset", "mode-line offset stability experiment");
    std::string off_family = "higher";
    double off_alpha = 0.25, off_beta = 1.0, theta0 = 0.0, offset = 1e-3, off_tend = 100.0;
    offset_cmd->add_option("--family", off_family, "higher|lower")->check(CLI::IsMember({"higher", "lower"}));
    offset_cmd->add_option("--alpha", off_alpha, "lower-symmetry alpha")->capture_default_str();
    offset_cmd->add_option("--beta", off_beta, "family beta")->capture_default_str();
    offset_cmd->add_option("--theta0", theta0, "critical angle to probe")->required();
    offset_cmd->add_option("--offset", offset, "angular offset")->capture_default_str();
    offset_cmd->add_option("--t-end", off_tend, "horizon")->capture_default_str();
    offset_cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (*eigs) {
            std::string base = out.empty() ? "spectrum" : out;
            SolverConfig config;
            config.starts = starts;
            config.tol = tol;
            config.dedup_tol = dedup_tol;
            config.seed = seed;
            config.random_starts = random_starts;
            std::string bytes = io::read_text_file(eigs_file);
            HomogeneousPolynomial poly = io::read_polynomial_file(eigs_file);
            SpectrumReport report = find_eigenpairs(poly, config);
            io::write_text_file(base + ".json", io::report_to_json(report, poly).dump(2) + "\n");
            io::write_text_file(base + ".csv", io::report_to_csv(report, poly.dim()));
            std::map<std::string, std::string> flags = {
                {"tensor", eigs_file},
                {"starts", std::to_string(starts)},
                {"tol", io::num(tol)},
                {"dedup-tol", io::num(dedup_tol)},
                {"seed", std::to_string(seed)},
                {"random-starts", std::to_string(random_starts)},
            };
            write_manifest(base + ".manifest.json", "eigs", flags, io::fnv1a64_hex(bytes));
            if (report.degenerate_family) {
                std::cerr << "degenerate family: continuum of critical points detected; "
                             "eigenpair list is unreliable\n";
                return kExitDegenerate;
            }
            std::cout << "eigenpairs: " << report.real_count << " (eigenspaces: "
                      << report.eigenspace_count << ")\n";
            return kExitOk;
        }

        if (*simulate) {
            std::string path = out.empty() ? "trajectory.csv" : out;
            std::string bytes = io::read_text_file(sim_file);
            HomogeneousPolynomial poly = io::read_polynomial_file(sim_file);
            SecondOrderSystem sys{poly, mass};
            State s0;
            s0.q = parse_vector(q0_text, poly.dim(), "--q0");
            s0.v = parse_vector(v0_text, poly.dim(), "--v0");
            s0.t = 0.0;

            bool equilibrium = s0.q.norm() == 0.0 && s0.v.norm() == 0.0;
            Trajectory traj;
            if (equilibrium) {
                traj.samples.push_back(s0);   // constant trajectory collapses to its initial row
            } else {
                traj = integrate(sys, s0, sim_dt, sim_tend);
            }
            io::write_text_file(path, io::trajectory_to_csv(sys, traj, stride));
            std::map<std::string, std::string> flags = {
                {"tensor", sim_file}, {"q0", q0_text},   {"v0", v0_text},
                {"dt", io::num(sim_dt)}, {"t-end", io::num(sim_tend)},
                {"stride", std::to_string(stride)}, {"mass", io::num(mass)},
            };
            write_manifest(path + ".manifest.json", "simulate", flags, io::fnv1a64_hex(bytes));
            std::cout << "energy drift: " << io::num(traj.energy_drift) << "\n";
            if (traj.blew_up) {
                std::cerr << "blow-up: trajectory truncated at t = " << io::num(traj.blowup_time) << "\n";
                return kExitBlowup;
            }
            return kExitOk;
        }

        if (*restrict_cmd) {
            std::string path = out.empty() ? "profile.csv" : out;
            QuarticFamily fam = family_from_flags(family, alpha, beta);
            AngularProfile profile = restrict_to_circle(fam, samples);
            bool pi_units = theta_units == "pi";
            if (format == "json") {
                nlohmann::json j;
                j["theta"] = profile.thetas;
                j["W"] = profile.values;
                j["theta_units"] = theta_units;
                if (pi_units) for (auto& t : j["theta"]) t = t.get<double>() / M_PI;
                io::write_text_file(path, j.dump(2) + "\n");
            } else {
                io::write_text_file(path, io::profile_to_csv(profile, pi_units));
            }
            if (!modes_out.empty()) {
                io::write_text_file(modes_out, io::modeset_to_csv(critical_angles(fam), pi_units));
            }
            std::map<std::string, std::string> flags = {
                {"family", family}, {"alpha", io::num(alpha)}, {"beta", io::num(beta)},
                {"samples", std::to_string(samples)}, {"theta-units", theta_units},
            };
            write_manifest(path + ".manifest.json", "restrict", flags, flags_digest(flags));
            return kExitOk;
        }

        if (*scan_cmd) {
            std::string path = out.empty() ? "scan.csv" : out;
            BetaRange r = parse_beta_range(range_text);
            BifurcationScan scan = bifurcation_scan(scan_alpha, r.lo, r.hi, r.step);
            if (format == "json") {
                nlohmann::json j;
                j["rows"] = nlohmann::json::array();
                for (const auto& row : scan.rows)
                    j["rows"].push_back({{"beta", row.beta}, {"count", row.count}, {"angles", row.angles}});
                j["transitions"] = scan.transitions;
                io::write_text_file(path, j.dump(2) + "\n");
            } else {
                io::write_text_file(path, io::scan_to_csv(scan));
            }
            std::map<std::string, std::string> flags = {
                {"alpha", io::num(scan_alpha)}, {"beta-range", range_text},
            };
            write_manifest(path + ".manifest.json", "scan", flags, flags_digest(flags));
            for (double b : scan.transitions)
                std::cout << "bifurcation at beta = " << io::num(b) << "\n";
            return kExitOk;
        }

        if (*check_cmd) {
            std::string path = out.empty() ? "check.json" : out;
            SolverConfig config;
            config.starts = check_starts;
            config.tol = tol;
            config.seed = seed;
            std::string bytes = io::read_text_file(check_file);
            HomogeneousPolynomial poly = io::read_polynomial_file(check_file);
            SpectrumReport report = find_eigenpairs(poly, config);
            io::write_text_file(path, io::report_to_json(report, poly).dump(2) + "\n");
            std::map<std::string, std::string> flags = {
                {"tensor", check_file}, {"starts", std::to_string(check_starts)}, {"tol", io::num(tol)},
            };
            write_manifest(path + ".manifest.json", "check", flags, io::fnv1a64_hex(bytes));
            if (report.degenerate_family) {
                std::cerr << "degenerate family: counting checks inapplicable\n";
                return kExitDegenerate;
            }
            std::cout << "real_count: " << report.real_count
                      << "  parity: " << io::tri_to_string(report.parity_ok)
                      << "  index_sum_ok: " << io::tri_to_string(report.index_sum_ok) << "\n";
            return kExitOk;
        }

        if (*mode_cmd) {
            std::string path = out.empty() ? "mode.csv" : out;
            ReducedMode mode;
            mode.alpha = mode_alpha;
            mode.p_exp = p_exp;
            ScalarTrajectory traj = integrate_mode(mode, y1, y2, mode_dt, mode_tend);
            io::write_text_file(path, io::scalar_to_csv(mode, traj, mode_stride));
            std::map<std::string, std::string> flags = {
                {"alpha", io::num(mode_alpha)}, {"p", std::to_string(p_exp)},
                {"y1", io::num(y1)}, {"y2", io::num(y2)},
                {"dt", io::num(mode_dt)}, {"t-end", io::num(mode_tend)},
            };
            write_manifest(path + ".manifest.json", "mode", flags, flags_digest(flags));
            switch (boundedness(mode)) {
                case Boundedness::Periodic: std::cout << "classification: periodic\n"; break;
                case Boundedness::Unbounded: std::cout << "classification: unbounded\n"; break;
                case Boundedness::Linear: std::cout << "classification: linear\n"; break;
            }
            if (auto period = detect_period(traj))
                std::cout << "period: " << io::num(*period) << "\n";
            std::cout << "psi drift: " << io::num(traj.psi_drift) << "\n";
            if (traj.blew_up) {
                std::cerr << "blow-up: trajectory truncated at t = " << io::num(traj.blowup_time) << "\n";
                return kExitBlowup;
            }
            return kExitOk;
        }

        if (*offset_cmd) {
            std::string path = out.empty() ? "offset.json" : out;
            QuarticFamily fam = family_from_flags(off_family, off_alpha, off_beta);
            OffsetResult result = offset_experiment(fam, theta0, offset, off_tend);
            io::write_text_file(path, io::offset_to_json(fam, theta0, offset, off_tend, result).dump(2) + "\n");
            std::map<std::string, std::string> flags = {
                {"family", off_family}, {"alpha", io::num(off_alpha)}, {"beta", io::num(off_beta)},
                {"theta0", io::num(theta0)}, {"offset", io::num(offset)}, {"t-end", io::num(off_tend)},
            };
            write_manifest(path + ".manifest.json", "offset", flags, flags_digest(flags));
            std::cout << "verdict: " << io::verdict_to_string(result.verdict)
                      << "  max deviation: " << io::num(result.max_deviation) << "\n";
            return kExitOk;
        }
    } catch (const input_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const solve_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
