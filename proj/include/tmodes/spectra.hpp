#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "tmodes/errors.hpp"
#include "tmodes/polynomial.hpp"

namespace tmodes {

/// Three-valued verdict for checks whose preconditions may not hold.
enum class TriState { True, False, Inapplicable };

enum class CriticalKind { Minimum, Maximum, Saddle, Degenerate };

/// Classification of a critical point of P restricted to the unit sphere.
struct CriticalClass {
    CriticalKind kind = CriticalKind::Degenerate;
    int saddle_index = 0;              // morse index when kind == Saddle
    int morse_index = 0;               // negative eigenvalues of the tangent second derivative
    std::optional<int> ph_index;       // empty when not computable
};

/// Unit eigenvector of the gradient map with its eigenvalue and diagnostics.
struct Eigenpair {
    Eigen::VectorXd v;
    double lambda = 0.0;
    double residual = 0.0;             // |grad P(v) - lambda v|
    TriState multiplicity_one = TriState::Inapplicable;
    CriticalClass classification;
};

/// Deduplicated eigenpair set plus the counting diagnostics.
struct SpectrumReport {
    std::vector<Eigenpair> eigenpairs;
    std::optional<long long> bezout_bound;  // absent when the gradient map is linear
    int real_count = 0;
    int eigenspace_count = 0;               // antipodal pairs counted once
    TriState parity_ok = TriState::Inapplicable;
    std::optional<long long> index_sum;     // absent when some index is unknown
    int chi = 0;                            // Euler characteristic of S^{m-1}
    TriState index_sum_ok = TriState::Inapplicable;
    bool degenerate_family = false;         // continuum of critical points detected
};

struct SolverConfig {
    int starts = 0;                 // 0 = automatic: max(200, 50 * eigenspace bound)
    double tol = 1e-10;             // residual acceptance threshold
    double dedup_tol = 1e-6;        // angular identification distance
    std::uint64_t seed = 0;         // seed for the optional extra random starts
    int random_starts = 0;
    int max_iters = 80;
    double degeneracy_tol = 1e-8;   // relative tangent-eigenvalue threshold
};

/// Maximal finite number of one-dimensional eigenspaces of a degree-p
/// homogeneous map in q variables: (p^q - 1) / (p - 1), exact.
inline long long bezout_bound(int p, int q) {
    if (p < 2) throw input_error("bezout_bound requires map degree >= 2, got " + std::to_string(p));
    if (q < 1) throw input_error("bezout_bound requires dimension >= 1, got " + std::to_string(q));
    // sum p^0 + p^1 + ... + p^{q-1} with overflow checks
    long long sum = 0, pow = 1;
    const long long cap = std::numeric_limits<long long>::max();
    for (int k = 0; k < q; ++k) {
        if (sum > cap - pow) throw std::overflow_error("bezout_bound overflows 64-bit integers");
        sum += pow;
        if (k + 1 < q) {
            if (pow > cap / p) throw std::overflow_error("bezout_bound overflows 64-bit integers");
            pow *= p;
        }
    }
    return sum;
}

namespace detail {

/// Orthonormal basis of the tangent space of the unit sphere at v (columns).
inline Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& v) {
    const int m = static_cast<int>(v.size());
    Eigen::MatrixXd col = v;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(col);
    Eigen::MatrixXd q = qr.householderQ();
    return q.rightCols(m - 1);
}

/// Winding number of the sphere-tangent gradient field on a small circle
/// around v (ambient dimension 3 only). Returns empty if the field is too
/// weak to give a reliable direction.
inline std::optional<int> winding_index(const HomogeneousPolynomial& poly,
                                        const Eigen::VectorXd& v, double radius,
                                        int samples = 64) {
    Eigen::MatrixXd u = tangent_basis(v);
    const Eigen::VectorXd u1 = u.col(0), u2 = u.col(1);
    double total = 0.0, prev = 0.0;
    bool have_prev = false;
    for (int j = 0; j <= samples; ++j) {
        double phi = 2.0 * M_PI * (j % samples) / samples;
        Eigen::VectorXd w =
            (std::cos(radius) * v + std::sin(radius) * (std::cos(phi) * u1 + std::sin(phi) * u2)).normalized();
        Eigen::VectorXd g = poly.gradient(w);
        g -= w.dot(g) * w;
        double a = g.dot(u1), b = g.dot(u2);
        if (std::hypot(a, b) < 1e-100) return std::nullopt;
        double ang = std::atan2(b, a);
        if (have_prev) {
            double d = ang - prev;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d <= -M_PI) d += 2.0 * M_PI;
            total += d;
        } else {
            have_prev = true;
        }
        prev = ang;
    }
    double w = total / (2.0 * M_PI);
    int rounded = static_cast<int>(std::lround(w));
    if (std::abs(w - rounded) > 0.25) return std::nullopt;
    return rounded;
}

} // namespace detail

/**
 * Classify a critical point by the sphere-restricted second derivative:
 * project hessian(P, v) - lambda I onto the tangent space at v. The
 * Poincare-Hopf index is (-1)^{morse index} at nondegenerate points; at
 * degenerate points in ambient dimension 3 it is computed as the winding
 * number of the tangent gradient field on a circle of radius
 * 100 * degeneracy_tol around v, and reported unknown otherwise.
 */
inline CriticalClass classify(const HomogeneousPolynomial& poly, const Eigenpair& e,
                              double degeneracy_tol = 1e-8) {
    const int m = poly.dim();
    CriticalClass c;
    Eigen::MatrixXd basis = detail::tangent_basis(e.v);
    Eigen::MatrixXd a = poly.hessian(e.v) - e.lambda * Eigen::MatrixXd::Identity(m, m);
    Eigen::MatrixXd proj = basis.transpose() * a * basis;
    proj = 0.5 * (proj + proj.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj);
    const Eigen::VectorXd ev = es.eigenvalues();
    const double scale = ev.cwiseAbs().maxCoeff();
    bool degenerate = (scale == 0.0);
    int morse = 0;
    for (int i = 0; i < ev.size(); ++i) {
        if (!degenerate && std::abs(ev[i]) < degeneracy_tol * scale) degenerate = true;
        if (ev[i] < 0.0) ++morse;
    }
    c.morse_index = morse;
    if (degenerate) {
        c.kind = CriticalKind::Degenerate;
        if (m == 3) c.ph_index = detail::winding_index(poly, e.v, 100.0 * degeneracy_tol);
    } else {
        if (morse == 0) c.kind = CriticalKind::Minimum;
        else if (morse == m - 1) c.kind = CriticalKind::Maximum;
        else {
            c.kind = CriticalKind::Saddle;
            c.saddle_index = morse;
        }
        c.ph_index = (morse % 2 == 0) ? 1 : -1;
    }
    return c;
}

/// Multiplicity-one test: lambda must not be an eigenvalue of the Jacobian
/// of the gradient map at v. Inapplicable when lambda is (numerically) zero.
inline TriState multiplicity_one(const HomogeneousPolynomial& poly, const Eigenpair& e,
                                 double rel_tol = 1e-8) {
    Eigen::MatrixXd h = poly.hessian(e.v);
    const double hscale = h.cwiseAbs().maxCoeff();
    if (std::abs(e.lambda) < 1e-12 * std::max(1.0, hscale)) return TriState::Inapplicable;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd mu = es.eigenvalues();
    const double scale = std::max({1.0, std::abs(e.lambda), mu.cwiseAbs().maxCoeff()});
    for (int i = 0; i < mu.size(); ++i) {
        if (std::abs(mu[i] - e.lambda) <= rel_tol * scale) return TriState::False;
    }
    return TriState::True;
}

/**
 * Newton refinement of a candidate eigenvector on the extended system
 * { grad P(x) - lambda x = 0, |x|^2 = 1 } started from x0/|x0| with
 * lambda0 = n P(x0/|x0|). Singular Newton steps fall back to a projected
 * gradient perturbation; persistent failure yields an empty result.
 */
inline std::optional<Eigenpair> refine(const HomogeneousPolynomial& poly, const Eigen::VectorXd& x0,
                                       double tol = 1e-12, int max_iters = 80,
                                       double degeneracy_tol = 1e-8) {
    const int m = poly.dim();
    const int n = poly.degree();
    if (x0.size() != m) throw input_error("refine: start point dimension mismatch");
    const double norm0 = x0.norm();
    if (!(norm0 > 0.0) || !std::isfinite(norm0)) throw input_error("refine: start point must be nonzero");

    Eigen::VectorXd x = x0 / norm0;
    double lambda = n * poly.evaluate(x);
    double best_res = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_x = x;
    double best_lambda = lambda;
    const double polish_tol = std::min(tol, 1e-12);  // dedup wants fully polished points

    for (int it = 0; it <= max_iters; ++it) {
        Eigen::VectorXd g = poly.gradient(x);
        Eigen::VectorXd r = g - lambda * x;
        double res = r.norm();
        double cons = std::abs(x.squaredNorm() - 1.0);
        if (res < best_res && cons < 1e-12) {
            best_res = res;
            best_x = x;
            best_lambda = lambda;
        }
        if (res < polish_tol && cons < 1e-12) break;
        if (it == max_iters) break;

        Eigen::MatrixXd jac(m + 1, m + 1);
        jac.topLeftCorner(m, m) = poly.hessian(x) - lambda * Eigen::MatrixXd::Identity(m, m);
        jac.topRightCorner(m, 1) = -x;
        jac.bottomLeftCorner(1, m) = x.transpose();
        jac(m, m) = 0.0;
        Eigen::VectorXd f(m + 1);
        f.head(m) = r;
        f(m) = 0.5 * (x.squaredNorm() - 1.0);

        Eigen::PartialPivLU<Eigen::MatrixXd> lu(jac);
        Eigen::VectorXd delta = lu.solve(-f);
        bool bad = !delta.allFinite() || delta.head(m).norm() > 1e3;
        if (bad) {
            // escape a singular configuration along the tangent gradient
            Eigen::VectorXd gt = g - x.dot(g) * x;
            double gn = gt.norm();
            if (gn < 1e-300) return std::nullopt;
            x = (x + 0.05 * gt / std::max(1.0, gn)).normalized();
            lambda = n * poly.evaluate(x);
            continue;
        }
        x += delta.head(m);
        lambda += delta(m);
        double nx = x.norm();
        if (!std::isfinite(nx) || nx < 1e-12) return std::nullopt;
        if (nx < 0.5 || nx > 2.0) {
            x /= nx;
            lambda = n * poly.evaluate(x);
        }
    }

    // project exactly onto the sphere and re-measure
    best_x.normalize();
    best_lambda = best_x.dot(poly.gradient(best_x));
    const double res = (poly.gradient(best_x) - best_lambda * best_x).norm();
    if (res >= tol) return std::nullopt;

    Eigenpair e;
    e.v = best_x;
    e.lambda = best_lambda;
    e.residual = res;
    e.classification = classify(poly, e, degeneracy_tol);
    e.multiplicity_one = multiplicity_one(poly, e);
    return e;
}

/// Sum of Poincare-Hopf indices must equal chi(S^{m-1}): 2 for odd m, 0 for even m.
inline TriState index_sum_check(const SpectrumReport& report, int m) {
    if (report.degenerate_family) return TriState::Inapplicable;
    long long sum = 0;
    for (const auto& e : report.eigenpairs) {
        if (!e.classification.ph_index) return TriState::Inapplicable;
        sum += *e.classification.ph_index;
    }
    const long long chi = (m % 2 == 1) ? 2 : 0;
    return sum == chi ? TriState::True : TriState::False;
}

/// Number of real eigenspaces must be congruent to the Bezout-type bound mod 2.
inline TriState parity_check(const SpectrumReport& report, int p, int q) {
    if (report.degenerate_family) return TriState::Inapplicable;
    if (p < 2) return TriState::Inapplicable;
    const long long nr = bezout_bound(p, q);
    return (report.eigenspace_count % 2 == nr % 2) ? TriState::True : TriState::False;
}

/**
 * Compatibility of a critical-point census on S^2 with the index-sum identity
 * and the Bezout-type bound: max + min - sum_k k * saddles[k] == 2, total
 * count <= 2 * bound, and max == min when the potential degree (p + 1) is odd.
 * saddle_counts maps k to the number of saddle points of index -k.
 */
inline bool table_compatibility(int max_count, int min_count,
                                const std::map<int, int>& saddle_counts, int m, int p) {
    if (m != 3) return false;
    long long index_sum = max_count + min_count;
    long long total = max_count + min_count;
    for (const auto& [k, cnt] : saddle_counts) {
        index_sum -= static_cast<long long>(k) * cnt;
        total += cnt;
    }
    if (index_sum != 2) return false;
    if (p >= 2 && total > 2 * bezout_bound(p, m)) return false;
    const bool odd_potential = ((p + 1) % 2 == 1);
    if (odd_potential && max_count != min_count) return false;
    return true;
}

namespace detail {

/// Deterministic well-spread start points on S^{m-1}.
inline std::vector<Eigen::VectorXd> sphere_starts(int m, int count, std::uint64_t seed,
                                                  int random_extra) {
    std::vector<Eigen::VectorXd> pts;
    pts.reserve(count + random_extra);
    if (m == 2) {
        for (int i = 0; i < count; ++i) {
            double th = -M_PI + 2.0 * M_PI * (i + 0.5) / count;
            pts.push_back(Eigen::Vector2d(std::cos(th), std::sin(th)));
        }
    } else if (m == 3) {
        const double ga = M_PI * (3.0 - std::sqrt(5.0));  // Fibonacci sphere
        for (int i = 0; i < count; ++i) {
            double z = 1.0 - 2.0 * (i + 0.5) / count;
            double r = std::sqrt(std::max(0.0, 1.0 - z * z));
            double th = ga * i;
            pts.push_back(Eigen::Vector3d(r * std::cos(th), r * std::sin(th), z));
        }
    } else {
        // Weyl additive recurrence mapped through Box-Muller, then normalized
        const int pairs = (m + 1) / 2;
        std::vector<double> alpha(2 * pairs);
        // generalized golden-ratio increments
        double phi = 2.0;
        for (int it = 0; it < 64; ++it) phi = std::pow(1.0 + phi, 1.0 / (2.0 * pairs + 1.0));
        double a = 1.0 / phi;
        for (int d = 0; d < 2 * pairs; ++d) {
            alpha[d] = std::fmod(std::pow(a, d + 1), 1.0);
        }
        std::vector<double> u(2 * pairs, 0.5);
        for (int i = 0; i < count; ++i) {
            Eigen::VectorXd v(m);
            for (int d = 0; d < 2 * pairs; ++d) u[d] = std::fmod(u[d] + alpha[d], 1.0);
            for (int k = 0; k < pairs; ++k) {
                double r = std::sqrt(-2.0 * std::log(std::max(u[2 * k], 1e-16)));
                double th = 2.0 * M_PI * u[2 * k + 1];
                double g1 = r * std::cos(th), g2 = r * std::sin(th);
                if (2 * k < m) v[2 * k] = g1;
                if (2 * k + 1 < m) v[2 * k + 1] = g2;
            }
            double nv = v.norm();
            if (nv > 1e-12) pts.push_back(v / nv);
        }
    }
    if (random_extra > 0) {
        std::uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ull;
        auto next = [&state]() {
            // xorshift64*
            state ^= state >> 12;
            state ^= state << 25;
            state ^= state >> 27;
            return static_cast<double>((state * 0x2545F4914F6CDD1Dull) >> 11) /
                   static_cast<double>(1ull << 53);
        };
        for (int i = 0; i < random_extra; ++i) {
            Eigen::VectorXd v(m);
            for (int d = 0; d < m; ++d) {
                double u1 = std::max(next(), 1e-16), u2 = next();
                v[d] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
            }
            double nv = v.norm();
            if (nv > 1e-12) pts.push_back(v / nv);
        }
    }
    return pts;
}

inline double angular_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double c = std::clamp(a.dot(b), -1.0, 1.0);
    return std::acos(c);
}

} // namespace detail

/**
 * Multistart search for all real unit eigenvectors of the gradient map of P.
 * Start points come from a deterministic low-discrepancy covering of the
 * sphere; every converged point is deduplicated by angular distance and
 * completed with its antipode. A count exceeding twice the eigenspace bound
 * signals a continuum of critical points and sets degenerate_family.
 */
inline SpectrumReport find_eigenpairs(const HomogeneousPolynomial& poly, const SolverConfig& config = {}) {
    const int m = poly.dim();
    const int n = poly.degree();
    if (m < 2) throw input_error("find_eigenpairs requires ambient dimension >= 2");
    const int p = n - 1;

    SpectrumReport report;
    report.chi = (m % 2 == 1) ? 2 : 0;
    long long target = (p >= 2) ? bezout_bound(p, m) : m;
    if (p >= 2) report.bezout_bound = target;

    int starts = config.starts > 0 ? config.starts
                                   : static_cast<int>(std::max<long long>(200, 50 * target));
    const double tol = config.tol;

    auto points = detail::sphere_starts(m, starts, config.seed, config.random_starts);
    std::vector<Eigenpair> found;
    int converged = 0;
    for (const auto& s : points) {
        auto e = refine(poly, s, tol, config.max_iters, config.degeneracy_tol);
        if (!e) continue;
        ++converged;
        bool dup = false;
        for (const auto& kept : found) {
            if (detail::angular_distance(e->v, kept.v) < config.dedup_tol) {
                dup = true;
                break;
            }
        }
        if (!dup) found.push_back(std::move(*e));
        if (static_cast<long long>(found.size()) > 4 * target + 8) break;  // already a continuum
    }
    if (converged == 0) throw solve_error("find_eigenpairs: no start point converged");

    // antipode completion: -v is always a critical point too
    std::size_t base = found.size();
    for (std::size_t i = 0; i < base; ++i) {
        Eigen::VectorXd anti = -found[i].v;
        bool present = false;
        for (const auto& kept : found) {
            if (detail::angular_distance(anti, kept.v) < config.dedup_tol) {
                present = true;
                break;
            }
        }
        if (!present) {
            auto e = refine(poly, anti, tol, config.max_iters, config.degeneracy_tol);
            if (e) found.push_back(std::move(*e));
        }
    }

    if (static_cast<long long>(found.size()) > 2 * target) {
        report.degenerate_family = true;
    }

    // deterministic order: by angle in the plane, lexicographic otherwise
    if (m == 2) {
        std::sort(found.begin(), found.end(), [](const Eigenpair& a, const Eigenpair& b) {
            return std::atan2(a.v[1], a.v[0]) < std::atan2(b.v[1], b.v[0]);
        });
    } else {
        std::sort(found.begin(), found.end(), [](const Eigenpair& a, const Eigenpair& b) {
            for (int i = 0; i < a.v.size(); ++i) {
                if (a.v[i] != b.v[i]) return a.v[i] < b.v[i];
            }
            return a.lambda < b.lambda;
        });
    }

    report.eigenpairs = std::move(found);
    report.real_count = static_cast<int>(report.eigenpairs.size());
    report.eigenspace_count = report.real_count / 2;
    if (!report.degenerate_family) {
        report.parity_ok = parity_check(report, p, m);
        long long sum = 0;
        bool known = true;
        for (const auto& e : report.eigenpairs) {
            if (!e.classification.ph_index) {
                known = false;
                break;
            }
            sum += *e.classification.ph_index;
        }
        if (known) report.index_sum = sum;
        report.index_sum_ok = index_sum_check(report, m);
    }
    return report;
}

} // namespace tmodes
