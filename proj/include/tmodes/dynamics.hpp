#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "tmodes/errors.hpp"
#include "tmodes/polynomial.hpp"
#include "tmodes/spectra.hpp"

namespace tmodes {

/// Second-order system q'' = -grad V(q) / mass for a homogeneous potential V.
struct SecondOrderSystem {
    HomogeneousPolynomial potential;
    double mass = 1.0;
};

struct State {
    Eigen::VectorXd q;
    Eigen::VectorXd v;
    double t = 0.0;
};

struct Trajectory {
    std::vector<State> samples;          // strictly increasing times
    double energy_drift = 0.0;           // max |H(t) - H(0)| over samples
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
};

/// Total energy H = mass |v|^2 / 2 + V(q).
inline double energy(const SecondOrderSystem& sys, const State& s) {
    if (s.q.size() != sys.potential.dim() || s.v.size() != sys.potential.dim())
        throw input_error("energy: state dimension mismatch");
    return 0.5 * sys.mass * s.v.squaredNorm() + sys.potential.evaluate(s.q);
}

namespace detail {

// McLachlan's optimized symmetric second-order composition coefficient.
// Kick(c h) Drift(h/2) Kick((1-2c) h) Drift(h/2) Kick(c h): time-reversible,
// second order, with a much smaller error constant than plain leapfrog.
inline constexpr double kCompositionC = 0.1931833275037836;

inline constexpr double kBlowupLimit = 1e12;

} // namespace detail

/**
 * Fixed-step time-reversible second-order integration of q'' = -grad V / mass
 * from s0 to t_end, sampling every step. A component magnitude above 1e12 (or
 * a non-finite value) truncates the run and marks the trajectory as blown up.
 */
inline Trajectory integrate(const SecondOrderSystem& sys, const State& s0, double dt, double t_end) {
    if (!(dt > 0.0)) throw input_error("integrate: dt must be positive");
    if (!(t_end > s0.t)) throw input_error("integrate: t_end must exceed the start time");
    if (s0.q.size() != sys.potential.dim() || s0.v.size() != sys.potential.dim())
        throw input_error("integrate: state dimension mismatch");

    const long long steps = std::llround((t_end - s0.t) / dt);
    const double c = detail::kCompositionC;
    Trajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    traj.samples.push_back(s0);

    Eigen::VectorXd q = s0.q, v = s0.v;
    Eigen::VectorXd a = -sys.potential.gradient(q) / sys.mass;
    const double e0 = energy(sys, s0);

    for (long long k = 0; k < steps; ++k) {
        v += c * dt * a;
        q += 0.5 * dt * v;
        a = -sys.potential.gradient(q) / sys.mass;
        v += (1.0 - 2.0 * c) * dt * a;
        q += 0.5 * dt * v;
        a = -sys.potential.gradient(q) / sys.mass;
        v += c * dt * a;

        double t = s0.t + (k + 1) * dt;
        bool finite = q.allFinite() && v.allFinite();
        if (!finite || q.cwiseAbs().maxCoeff() > detail::kBlowupLimit) {
            traj.blew_up = true;
            traj.blowup_time = t;
            if (finite) traj.samples.push_back(State{q, v, t});
            break;
        }
        traj.samples.push_back(State{q, v, t});
        traj.energy_drift = std::max(traj.energy_drift, std::abs(energy(sys, traj.samples.back()) - e0));
    }
    return traj;
}

/// Maximum over samples of the angular distance between q(t) and the line
/// spanned by v; zero whenever |q| is below 1e-12.
inline double line_deviation(const Trajectory& traj, const Eigen::VectorXd& v) {
    Eigen::VectorXd u = v.normalized();
    double dev = 0.0;
    for (const auto& s : traj.samples) {
        double r = s.q.norm();
        if (r < 1e-12) continue;
        double par = std::abs(s.q.dot(u));
        double perp = (s.q - s.q.dot(u) * u).norm();
        dev = std::max(dev, std::atan2(perp, par));
    }
    return dev;
}

/// Scalar equation gamma'' = alpha gamma^p governing motion along an eigenline.
struct ReducedMode {
    double alpha = 0.0;
    int p_exp = 1;
    Eigen::VectorXd direction;
};

/// Mode reduction: along the eigenline of e the dynamics collapses to
/// gamma'' = -(lambda/mass) gamma^{n-1}.
inline ReducedMode reduced_mode(const SecondOrderSystem& sys, const Eigenpair& e) {
    ReducedMode mode;
    mode.alpha = -e.lambda / sys.mass;
    mode.p_exp = sys.potential.degree() - 1;
    mode.direction = e.v;
    return mode;
}

/// First integral of the reduced equation: psi = 2 alpha y1^{p+1} - (p+1) y2^2.
inline double psi(const ReducedMode& mode, double y1, double y2) {
    return 2.0 * mode.alpha * detail::ipow(y1, mode.p_exp + 1) - (mode.p_exp + 1) * y2 * y2;
}

enum class Boundedness { Periodic, Unbounded, Linear };

/// Level sets of psi are bounded (hence orbits periodic) exactly when
/// alpha < 0 and p is odd; p = 1 is the classical linear oscillator.
inline Boundedness boundedness(const ReducedMode& mode) {
    if (mode.p_exp == 1) return Boundedness::Linear;
    if (mode.alpha < 0.0 && mode.p_exp % 2 == 1) return Boundedness::Periodic;
    return Boundedness::Unbounded;
}

struct ScalarSample {
    double t = 0.0;
    double gamma = 0.0;
    double gammadot = 0.0;
};

struct ScalarTrajectory {
    std::vector<ScalarSample> samples;
    bool blew_up = false;
    double blowup_time = std::numeric_limits<double>::quiet_NaN();
    double psi_drift = 0.0;              // max |psi(t) - psi(0)| over samples
};

/// Same composition scheme applied to the scalar mode equation.
inline ScalarTrajectory integrate_mode(const ReducedMode& mode, double gamma0, double gammadot0,
                                       double dt, double t_end) {
    if (!(dt > 0.0)) throw input_error("integrate_mode: dt must be positive");
    if (!(t_end > 0.0)) throw input_error("integrate_mode: t_end must be positive");
    const long long steps = std::llround(t_end / dt);
    const double c = detail::kCompositionC;
    ScalarTrajectory traj;
    traj.samples.reserve(static_cast<std::size_t>(steps) + 1);
    traj.samples.push_back({0.0, gamma0, gammadot0});

    double g = gamma0, gd = gammadot0;
    double a = mode.alpha * detail::ipow(g, mode.p_exp);
    const double psi0 = psi(mode, gamma0, gammadot0);

    for (long long k = 0; k < steps; ++k) {
        gd += c * dt * a;
        g += 0.5 * dt * gd;
        a = mode.alpha * detail::ipow(g, mode.p_exp);
        gd += (1.0 - 2.0 * c) * dt * a;
        g += 0.5 * dt * gd;
        a = mode.alpha * detail::ipow(g, mode.p_exp);
        gd += c * dt * a;

        double t = (k + 1) * dt;
        if (!std::isfinite(g) || !std::isfinite(gd) || std::abs(g) > detail::kBlowupLimit) {
            traj.blew_up = true;
            traj.blowup_time = t;
            if (std::isfinite(g) && std::isfinite(gd)) traj.samples.push_back({t, g, gd});
            break;
        }
        traj.samples.push_back({t, g, gd});
        traj.psi_drift = std::max(traj.psi_drift, std::abs(psi(mode, g, gd) - psi0));
    }
    return traj;
}

/**
 * Period of a closed scalar orbit, detected as the time for the phase-plane
 * winding angle of (gamma, gammadot) to accumulate a full turn, with linear
 * interpolation across the final step. Empty when no full turn happens.
 */
inline std::optional<double> detect_period(const ScalarTrajectory& traj) {
    if (traj.blew_up || traj.samples.size() < 3) return std::nullopt;
    double scale = 0.0;
    for (const auto& s : traj.samples) scale = std::max(scale, std::abs(s.gammadot));
    if (scale == 0.0) return std::nullopt;

    double total = 0.0;
    double prev = std::atan2(traj.samples[0].gammadot / scale, traj.samples[0].gamma);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        double ang = std::atan2(traj.samples[i].gammadot / scale, traj.samples[i].gamma);
        double d = ang - prev;
        while (d > M_PI) d -= 2.0 * M_PI;
        while (d <= -M_PI) d += 2.0 * M_PI;
        double before = total;
        total += d;
        if (std::abs(total) >= 2.0 * M_PI) {
            double need = (2.0 * M_PI - std::abs(before)) / std::abs(d);
            return traj.samples[i - 1].t + need * (traj.samples[i].t - traj.samples[i - 1].t);
        }
        prev = ang;
    }
    return std::nullopt;
}

/**
 * Residual of the cubic-pump first integral: for p = 2 the mode equation
 * implies zdot^2 = (2/3) alpha z^3 + c with c fixed by the initial sample.
 * Returns the max violation over the trajectory.
 */
inline double weierstrass_residual(const ReducedMode& mode, const ScalarTrajectory& traj) {
    if (mode.p_exp != 2)
        throw input_error("weierstrass_residual requires a mode with exponent 2, got " +
                          std::to_string(mode.p_exp));
    if (traj.samples.empty()) return 0.0;
    const auto& s0 = traj.samples.front();
    const double c = s0.gammadot * s0.gammadot - (2.0 / 3.0) * mode.alpha * detail::ipow(s0.gamma, 3);
    double res = 0.0;
    for (const auto& s : traj.samples) {
        double r = s.gammadot * s.gammadot - (2.0 / 3.0) * mode.alpha * detail::ipow(s.gamma, 3) - c;
        res = std::max(res, std::abs(r));
    }
    return res;
}

} // namespace tmodes
