#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "tmodes/dynamics.hpp"
#include "tmodes/errors.hpp"
#include "tmodes/polynomial.hpp"
#include "tmodes/spectra.hpp"

namespace tmodes {

/// Planar quartic with the symmetries of the square: (x^2+y^2)^2 + beta x^2 y^2.
/// Admissible for beta > -4 (origin a minimum) and beta != 0 (beta = 0 is the
/// rotationally invariant continuum case).
struct HigherSymmetry {
    double beta = 1.0;
};

/// Planar quartic with independent reflection symmetries only:
/// x^4 + alpha y^4 + 2 beta x^2 y^2, with 0 < alpha < 1 and beta > -sqrt(alpha).
struct LowerSymmetry {
    double alpha = 0.25;
    double beta = 0.0;
};

using QuarticFamily = std::variant<HigherSymmetry, LowerSymmetry>;

/// Throws input_error naming the violated admissibility constraint.
inline void validate(const QuarticFamily& family) {
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        if (!(h->beta > -4.0))
            throw input_error("higher-symmetry family requires beta > -4 (origin minimum), got beta = " +
                              std::to_string(h->beta));
        if (h->beta == 0.0)
            throw input_error("higher-symmetry family requires beta != 0 (beta = 0 is rotationally "
                              "invariant with a continuum of critical points)");
    } else {
        const auto& l = std::get<LowerSymmetry>(family);
        if (!(l.alpha > 0.0 && l.alpha < 1.0))
            throw input_error("lower-symmetry family requires 0 < alpha < 1, got alpha = " +
                              std::to_string(l.alpha));
        if (!(l.beta > -std::sqrt(l.alpha)))
            throw input_error("lower-symmetry family requires beta > -sqrt(alpha) (origin stability), "
                              "got beta = " + std::to_string(l.beta));
    }
}

inline HomogeneousPolynomial potential_of(const QuarticFamily& family) {
    validate(family);
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        return HomogeneousPolynomial::from_terms(
            2, 4, {{{4, 0}, 1.0}, {{0, 4}, 1.0}, {{2, 2}, 2.0 + h->beta}});
    }
    const auto& l = std::get<LowerSymmetry>(family);
    return HomogeneousPolynomial::from_terms(
        2, 4, {{{4, 0}, 1.0}, {{0, 4}, l.alpha}, {{2, 2}, 2.0 * l.beta}});
}

/// Closed form of the restriction W(theta) = V(cos theta, sin theta).
inline double w_value(const QuarticFamily& family, double theta) {
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        return (8.0 - h->beta * std::cos(4.0 * theta) + h->beta) / 8.0;
    }
    const auto& l = std::get<LowerSymmetry>(family);
    double c = std::cos(theta), s = std::sin(theta);
    return c * c * c * c + l.alpha * s * s * s * s + 2.0 * l.beta * s * s * c * c;
}

inline double w_derivative(const QuarticFamily& family, double theta) {
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        return 0.5 * h->beta * std::sin(4.0 * theta);
    }
    const auto& l = std::get<LowerSymmetry>(family);
    return -((1.0 - l.alpha) + (1.0 + l.alpha - 2.0 * l.beta) * std::cos(2.0 * theta)) *
           std::sin(2.0 * theta);
}

inline double w_second_derivative(const QuarticFamily& family, double theta) {
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        return 2.0 * h->beta * std::cos(4.0 * theta);
    }
    const auto& l = std::get<LowerSymmetry>(family);
    return -2.0 * ((1.0 - l.alpha) * std::cos(2.0 * theta) +
                   (1.0 + l.alpha - 2.0 * l.beta) * std::cos(4.0 * theta));
}

struct AngularProfile {
    std::vector<double> thetas;   // uniform on (-pi, pi]
    std::vector<double> values;   // W(theta)
};

/// Uniform sampling of W on the circle from the closed forms.
inline AngularProfile restrict_to_circle(const QuarticFamily& family, int samples) {
    validate(family);
    if (samples < 8) throw input_error("restrict_to_circle requires at least 8 samples, got " +
                                       std::to_string(samples));
    AngularProfile profile;
    profile.thetas.reserve(samples);
    profile.values.reserve(samples);
    for (int j = 0; j < samples; ++j) {
        double theta = -M_PI + 2.0 * M_PI * (j + 1) / samples;
        profile.thetas.push_back(theta);
        profile.values.push_back(w_value(family, theta));
    }
    return profile;
}

enum class AngleKind { Stable, Unstable, DegenerateAngle };

struct ModeAngle {
    double theta = 0.0;
    double second_deriv = 0.0;      // d^2 W / d theta^2 at theta
    AngleKind kind = AngleKind::DegenerateAngle;
    double c_coeff = 0.0;           // effective radial coefficient, = W(theta)
};

struct ModeSet {
    std::vector<ModeAngle> angles;  // ascending theta in (-pi, pi]
};

namespace detail {

inline AngleKind kind_from_second_deriv(double d2) {
    constexpr double tol = 1e-12;
    if (d2 > tol) return AngleKind::Stable;
    if (d2 < -tol) return AngleKind::Unstable;
    return AngleKind::DegenerateAngle;
}

} // namespace detail

/**
 * All critical angles of W with the closed-form second derivatives.
 * Higher symmetry: the eight angles k pi/4. Lower symmetry: the axes
 * {0, pi, +-pi/2} always, plus the four oblique angles from
 * cos(2 theta) = (alpha - 1)/(1 + alpha - 2 beta) exactly when beta < alpha
 * or beta > 1. At beta = alpha or beta = 1 the merging angles are reported
 * degenerate (second derivative zero).
 */
inline ModeSet critical_angles(const QuarticFamily& family) {
    validate(family);
    ModeSet set;
    if (const auto* h = std::get_if<HigherSymmetry>(&family)) {
        for (int k = -3; k <= 4; ++k) {
            double theta = k * M_PI / 4.0;
            ModeAngle a;
            a.theta = theta;
            a.second_deriv = 2.0 * h->beta * std::cos(4.0 * theta);
            a.kind = detail::kind_from_second_deriv(a.second_deriv);
            a.c_coeff = w_value(family, theta);
            set.angles.push_back(a);
        }
    } else {
        const auto& l = std::get<LowerSymmetry>(family);
        auto push = [&](double theta, double d2) {
            ModeAngle a;
            a.theta = theta;
            a.second_deriv = d2;
            a.kind = detail::kind_from_second_deriv(d2);
            a.c_coeff = w_value(family, theta);
            set.angles.push_back(a);
        };
        push(0.0, -4.0 * (1.0 - l.beta));
        push(M_PI, -4.0 * (1.0 - l.beta));
        push(M_PI / 2.0, -4.0 * (l.alpha - l.beta));
        push(-M_PI / 2.0, -4.0 * (l.alpha - l.beta));
        if (l.beta < l.alpha || l.beta > 1.0) {
            double u = (l.alpha - 1.0) / (1.0 + l.alpha - 2.0 * l.beta);
            double theta_star = 0.5 * std::acos(std::clamp(u, -1.0, 1.0));
            double d2 = 8.0 * (l.alpha - l.beta) * (1.0 - l.beta) / (1.0 + l.alpha - 2.0 * l.beta);
            push(theta_star, d2);
            push(-theta_star, d2);
            push(M_PI - theta_star, d2);
            push(theta_star - M_PI, d2);
        }
    }
    std::sort(set.angles.begin(), set.angles.end(),
              [](const ModeAngle& a, const ModeAngle& b) { return a.theta < b.theta; });
    return set;
}

struct ScanRow {
    double beta = 0.0;
    int count = 0;
    std::vector<double> angles;
};

struct BifurcationScan {
    std::vector<ScanRow> rows;
    std::vector<double> transitions;   // bisection-refined parameter values
};

/**
 * Sweep the lower-symmetry family over beta, recording the critical-angle
 * count per step; count changes between adjacent steps are refined by
 * bisection to 1e-9.
 */
inline BifurcationScan bifurcation_scan(double alpha, double lo, double hi, double step) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw input_error("bifurcation_scan requires 0 < alpha < 1");
    if (!(lo > -std::sqrt(alpha)))
        throw input_error("bifurcation_scan range must start above -sqrt(alpha)");
    if (!(step > 0.0) || hi < lo) throw input_error("bifurcation_scan: invalid beta range");

    auto count_at = [alpha](double beta) {
        return static_cast<int>(critical_angles(LowerSymmetry{alpha, beta}).angles.size());
    };

    BifurcationScan scan;
    for (double beta = lo; beta <= hi + 0.5 * step; beta += step) {
        ScanRow row;
        row.beta = beta;
        auto set = critical_angles(LowerSymmetry{alpha, beta});
        row.count = static_cast<int>(set.angles.size());
        for (const auto& a : set.angles) row.angles.push_back(a.theta);
        scan.rows.push_back(std::move(row));
    }
    for (std::size_t i = 1; i < scan.rows.size(); ++i) {
        if (scan.rows[i].count == scan.rows[i - 1].count) continue;
        double a = scan.rows[i - 1].beta, b = scan.rows[i].beta;
        int ca = scan.rows[i - 1].count;
        while (b - a > 1e-9) {
            double mid = 0.5 * (a + b);
            if (count_at(mid) == ca) a = mid;
            else b = mid;
        }
        scan.transitions.push_back(0.5 * (a + b));
    }
    return scan;
}

enum class OffsetVerdict { Stable, Unstable, Inconclusive };

struct OffsetResult {
    OffsetVerdict verdict = OffsetVerdict::Inconclusive;
    double max_deviation = 0.0;        // max distance from the mode line over the run
    double containment_threshold = 0.0;
    double escape_threshold = 0.5;
};

/**
 * Empirical mode-stability probe: start at rest on the unit circle at angle
 * theta0 + offset and integrate to t_end (dt = 1e-3). The verdict is Stable
 * when the distance from the mode line never exceeds 10x the initial offset,
 * Unstable when it exceeds 0.5, and Inconclusive in between.
 */
inline OffsetResult offset_experiment(const QuarticFamily& family, double theta0, double offset,
                                      double t_end) {
    validate(family);
    if (std::abs(w_derivative(family, theta0)) > 1e-8)
        throw input_error("offset_experiment: theta0 is not a critical angle of this family");

    const double dt = 1e-3;
    SecondOrderSystem sys{potential_of(family), 1.0};
    State s0;
    s0.q = Eigen::Vector2d(std::cos(theta0 + offset), std::sin(theta0 + offset));
    s0.v = Eigen::Vector2d::Zero();
    Trajectory traj = integrate(sys, s0, dt, t_end);

    const Eigen::Vector2d line(std::cos(theta0), std::sin(theta0));
    double dev = 0.0;
    for (const auto& s : traj.samples) {
        double perp = (s.q - s.q.dot(line) * line).norm();
        dev = std::max(dev, perp);
    }

    OffsetResult result;
    result.max_deviation = dev;
    result.containment_threshold = 10.0 * std::abs(offset);
    result.escape_threshold = 0.5;
    if (dev > result.escape_threshold) result.verdict = OffsetVerdict::Unstable;
    else if (dev < result.containment_threshold) result.verdict = OffsetVerdict::Stable;
    else result.verdict = OffsetVerdict::Inconclusive;
    return result;
}

struct CrossValidation {
    bool ok = false;
    std::string diagnostic;
    ModeSet analytic;
    SpectrumReport numeric;
};

/**
 * Consistency harness: the multistart solver and the closed-form mode set
 * must agree on count, angles (1e-8), stability kinds, and eigenvalues
 * (lambda = 4 W(theta), 1e-9).
 */
inline CrossValidation cross_validate(const QuarticFamily& family, const SolverConfig& config = {}) {
    CrossValidation cv;
    cv.analytic = critical_angles(family);
    cv.numeric = find_eigenpairs(potential_of(family), config);
    std::ostringstream diag;

    if (cv.numeric.degenerate_family) {
        diag << "solver flagged a degenerate family; analytic count " << cv.analytic.angles.size();
        cv.diagnostic = diag.str();
        return cv;
    }
    bool ok = true;
    if (static_cast<int>(cv.analytic.angles.size()) != cv.numeric.real_count) {
        ok = false;
        diag << "count mismatch: analytic " << cv.analytic.angles.size() << " vs numeric "
             << cv.numeric.real_count << "; ";
    }
    for (const auto& a : cv.analytic.angles) {
        const Eigenpair* match = nullptr;
        double best = 1e9;
        for (const auto& e : cv.numeric.eigenpairs) {
            double ang = std::atan2(e.v[1], e.v[0]);
            double d = std::abs(std::remainder(ang - a.theta, 2.0 * M_PI));
            if (d < best) {
                best = d;
                match = &e;
            }
        }
        if (!match || best > 1e-8) {
            ok = false;
            diag << "no eigenpair at theta = " << a.theta << " (nearest off by " << best << "); ";
            continue;
        }
        double lambda_expected = 4.0 * w_value(family, a.theta);
        if (std::abs(match->lambda - lambda_expected) > 1e-9) {
            ok = false;
            diag << "lambda at theta = " << a.theta << ": numeric " << match->lambda
                 << " vs analytic " << lambda_expected << "; ";
        }
        bool kind_match = false;
        switch (a.kind) {
            case AngleKind::Stable: kind_match = match->classification.kind == CriticalKind::Minimum; break;
            case AngleKind::Unstable: kind_match = match->classification.kind == CriticalKind::Maximum; break;
            case AngleKind::DegenerateAngle:
                kind_match = match->classification.kind == CriticalKind::Degenerate;
                break;
        }
        if (!kind_match) {
            ok = false;
            diag << "kind mismatch at theta = " << a.theta << "; ";
        }
    }
    cv.ok = ok;
    cv.diagnostic = diag.str();
    return cv;
}

} // namespace tmodes
