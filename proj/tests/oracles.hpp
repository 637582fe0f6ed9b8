// Test-only oracles, independent of the library implementation paths they
// check: finite differences, dense angular scans, exhaustive tuple counting,
// quadrature. Kept header-only and deliberately brute force.
#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "tmodes/polynomial.hpp"

namespace oracles {

/// Central finite-difference gradient of f at x.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd g(x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// Central finite-difference Jacobian of a vector field at x.
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-5) {
    Eigen::VectorXd f0 = f(x);
    Eigen::MatrixXd j(f0.size(), x.size());
    for (int i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        j.col(i) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return j;
}

/// Central second difference of a scalar function of one variable.
inline double fd_second_derivative(const std::function<double(double)>& f, double t, double h = 1e-5) {
    return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
}

/// Multiset permutation count by exhaustive enumeration of all m^n index
/// tuples (independent of any factorial formula).
inline long long count_tuples_with_signature(const tmodes::Monomial& exponents) {
    const int m = static_cast<int>(exponents.size());
    int n = 0;
    for (int e : exponents) n += e;
    std::vector<int> idx(n, 0);
    long long count = 0;
    while (true) {
        std::vector<int> sig(m, 0);
        for (int s : idx) ++sig[s];
        if (sig == exponents) ++count;
        int s = n - 1;
        while (s >= 0 && ++idx[s] == m) idx[s--] = 0;
        if (s < 0) break;
    }
    return count;
}

/// All critical angles of theta -> P(cos theta, sin theta) on (-pi, pi],
/// located by a dense scan for sign changes of the angular derivative and
/// bisection refinement. The derivative is grad P . (-sin, cos), so this
/// route shares no code with any angular closed form under test.
inline std::vector<double> circle_critical_angles(const tmodes::HomogeneousPolynomial& poly,
                                                  int samples = 360000, double tol = 1e-12) {
    auto dw = [&poly](double th) {
        Eigen::Vector2d u(std::cos(th), std::sin(th));
        Eigen::Vector2d t(-std::sin(th), std::cos(th));
        return poly.gradient(u).dot(t);
    };
    std::vector<double> angles;
    double prev_th = -M_PI;
    double prev = dw(prev_th);
    for (int i = 1; i <= samples; ++i) {
        double th = -M_PI + 2.0 * M_PI * i / samples;
        double cur = dw(th);
        if (prev == 0.0) {
            angles.push_back(prev_th);
        } else if (prev * cur < 0.0) {
            double a = prev_th, b = th, fa = prev;
            while (b - a > tol) {
                double mid = 0.5 * (a + b);
                double fm = dw(mid);
                if (fm == 0.0) { a = b = mid; break; }
                if (fa * fm < 0.0) b = mid;
                else { a = mid; fa = fm; }
            }
            angles.push_back(0.5 * (a + b));
        }
        prev_th = th;
        prev = cur;
    }
    return angles;
}

/// Golden-section minimizer for a unimodal bracket.
inline double golden_minimize(const std::function<double(double)>& f, double a, double b,
                              double tol = 1e-12) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (b - a > tol) {
        if (f(c) < f(d)) b = d;
        else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

/// Period of gamma'' = alpha gamma^3 (alpha < 0) from a rest start at
/// amplitude a, by quadrature: T = 4 int_0^a dg / sqrt(|alpha| (a^4 - g^4)/2),
/// regularized with g = a (1 - u^2) and integrated by Simpson's rule.
inline double quartic_period(double alpha, double amplitude) {
    const double k = -alpha;  // gamma'' = -k gamma^3, k > 0
    auto integrand = [](double u) {
        double g = 1.0 - u * u;
        return 2.0 / std::sqrt((1.0 + g) * (1.0 + g * g));
    };
    const int n = 20000;  // Simpson on [0, 1]
    double h = 1.0 / n;
    double sum = integrand(0.0) + integrand(1.0);
    for (int i = 1; i < n; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * integrand(i * h);
    double base = sum * h / 3.0;  // int_0^1 (1-g^4)^{-1/2} dg after substitution
    // scale: T(k=1, a=1) = 4 sqrt(2) base; general T = T(1,1) / (a sqrt(k))
    return 4.0 * std::sqrt(2.0) * base / (amplitude * std::sqrt(k));
}

/// Random homogeneous polynomial with dense coefficients in [-range, range].
inline tmodes::HomogeneousPolynomial random_polynomial(int dim, int degree, std::mt19937_64& rng,
                                                       double range = 2.0) {
    std::vector<std::pair<tmodes::Monomial, double>> terms;
    std::uniform_real_distribution<double> dist(-range, range);
    std::function<void(tmodes::Monomial&, int, int)> rec = [&](tmodes::Monomial& mono, int pos, int rem) {
        if (pos == dim - 1) {
            mono[pos] = rem;
            terms.emplace_back(mono, dist(rng));
            return;
        }
        for (int e = 0; e <= rem; ++e) {
            mono[pos] = e;
            rec(mono, pos + 1, rem - e);
        }
    };
    tmodes::Monomial mono(dim, 0);
    rec(mono, 0, degree);
    return tmodes::HomogeneousPolynomial::from_terms(dim, degree, terms);
}

inline Eigen::VectorXd random_point(int dim, std::mt19937_64& rng, double radius = 2.0) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Eigen::VectorXd x(dim);
    for (int i = 0; i < dim; ++i) x[i] = dist(rng);
    if (x.norm() > 1e-12) x *= radius / x.norm() * std::abs(dist(rng));
    return x;
}

} // namespace oracles
