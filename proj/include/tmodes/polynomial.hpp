#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <sstream>
#include <utility>
#include <vector>

#include "tmodes/errors.hpp"

namespace tmodes {

/// Exponent vector of a monomial; entry i is the power of coordinate i.
using Monomial = std::vector<int>;

namespace detail {

inline double ipow(double x, int e) {
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= x;
    return r;
}

inline long long factorial(int n) {
    long long r = 1;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

/// Number of distinct index tuples realizing an exponent vector: n! / prod(e_i!).
inline long long multinomial(const Monomial& e) {
    int n = std::accumulate(e.begin(), e.end(), 0);
    long long r = factorial(n);
    for (int ei : e) r /= factorial(ei);
    return r;
}

} // namespace detail

class SymmetricTensor;

/**
 * Homogeneous polynomial of degree n on R^m, stored sparsely as a map from
 * exponent vectors to coefficients. Immutable after construction; all
 * operations are pure, so values can be shared freely across threads.
 *
 * Degrees 0 and 1 are rejected: the point of this type is potentials whose
 * leading term has degree >= 2.
 */
class HomogeneousPolynomial {
public:
    HomogeneousPolynomial(int dim, int degree, std::map<Monomial, double> terms)
        : dim_(dim), degree_(degree), terms_(std::move(terms)) {}

    /// Canonical constructor: validates monomials, sums duplicates, drops zero coefficients.
    static HomogeneousPolynomial from_terms(int dim, int degree,
                                            const std::vector<std::pair<Monomial, double>>& terms) {
        if (dim < 1) throw input_error("polynomial dimension must be >= 1, got " + std::to_string(dim));
        if (degree < 2) throw input_error("polynomial degree must be >= 2, got " + std::to_string(degree));
        std::map<Monomial, double> acc;
        for (std::size_t k = 0; k < terms.size(); ++k) {
            const auto& [mono, coeff] = terms[k];
            if (static_cast<int>(mono.size()) != dim) {
                throw input_error("term " + std::to_string(k) + ": monomial has " +
                                  std::to_string(mono.size()) + " exponents, dim is " + std::to_string(dim));
            }
            int total = 0;
            for (int e : mono) {
                if (e < 0) throw input_error("term " + std::to_string(k) + ": negative exponent");
                total += e;
            }
            if (total != degree) {
                throw input_error("term " + std::to_string(k) + ": monomial degree " +
                                  std::to_string(total) + " does not match degree " + std::to_string(degree));
            }
            acc[mono] += coeff;
        }
        for (auto it = acc.begin(); it != acc.end();) {
            if (it->second == 0.0) it = acc.erase(it);
            else ++it;
        }
        return HomogeneousPolynomial(dim, degree, std::move(acc));
    }

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const std::map<Monomial, double>& terms() const { return terms_; }

    double evaluate(const Eigen::VectorXd& x) const {
        check_dim(x);
        double sum = 0.0;
        for (const auto& [mono, coeff] : terms_) {
            double t = coeff;
            for (int i = 0; i < dim_; ++i) t *= detail::ipow(x[i], mono[i]);
            sum += t;
        }
        return sum;
    }

    /// Componentwise partial derivatives; each component is homogeneous of degree n-1.
    Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
        check_dim(x);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
        for (const auto& [mono, coeff] : terms_) {
            for (int i = 0; i < dim_; ++i) {
                if (mono[i] == 0) continue;
                double t = coeff * mono[i];
                for (int j = 0; j < dim_; ++j) {
                    int e = mono[j] - (j == i ? 1 : 0);
                    t *= detail::ipow(x[j], e);
                }
                g[i] += t;
            }
        }
        return g;
    }

    /// Symmetric matrix of second partials, homogeneous of degree n-2 per entry.
    Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const {
        check_dim(x);
        Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim_, dim_);
        for (const auto& [mono, coeff] : terms_) {
            for (int i = 0; i < dim_; ++i) {
                if (mono[i] == 0) continue;
                for (int j = i; j < dim_; ++j) {
                    double f = static_cast<double>(mono[i]) * (j == i ? mono[i] - 1 : mono[j]);
                    if (f == 0.0) continue;
                    double t = coeff * f;
                    for (int k = 0; k < dim_; ++k) {
                        int e = mono[k] - (k == i ? 1 : 0) - (k == j ? 1 : 0);
                        t *= detail::ipow(x[k], e);
                    }
                    h(i, j) += t;
                }
            }
        }
        for (int i = 0; i < dim_; ++i)
            for (int j = 0; j < i; ++j) h(i, j) = h(j, i);
        return h;
    }

    /// The symmetric order-n coefficient array view of this polynomial.
    SymmetricTensor tensor_view() const;

private:
    void check_dim(const Eigen::VectorXd& x) const {
        if (x.size() != dim_) {
            throw input_error("point has dimension " + std::to_string(x.size()) +
                              ", polynomial has dimension " + std::to_string(dim_));
        }
    }

    int dim_;
    int degree_;
    std::map<Monomial, double> terms_;
};

/**
 * Fully symmetric order-n tensor view of a homogeneous polynomial. Entries
 * carry the 1/multinomial normalization, so contracting with x once per
 * index slot reproduces the polynomial value exactly.
 */
class SymmetricTensor {
public:
    explicit SymmetricTensor(HomogeneousPolynomial poly) : poly_(std::move(poly)) {}

    int dim() const { return poly_.dim(); }
    int order() const { return poly_.degree(); }

    /// Entry at a full index tuple (0-based, one index per slot).
    double entry(std::span<const int> indices) const {
        if (static_cast<int>(indices.size()) != poly_.degree())
            throw input_error("index tuple has " + std::to_string(indices.size()) +
                              " slots, tensor order is " + std::to_string(poly_.degree()));
        Monomial e(poly_.dim(), 0);
        for (int idx : indices) {
            if (idx < 0 || idx >= poly_.dim())
                throw input_error("tensor index out of range");
            ++e[idx];
        }
        auto it = poly_.terms().find(e);
        if (it == poly_.terms().end()) return 0.0;
        return it->second / static_cast<double>(detail::multinomial(e));
    }

    /// Full contraction over all m^n index tuples; equals evaluate() by construction.
    double contract(const Eigen::VectorXd& x) const {
        if (x.size() != poly_.dim()) throw input_error("contract: dimension mismatch");
        const int n = poly_.degree();
        const int m = poly_.dim();
        std::vector<int> idx(n, 0);
        double sum = 0.0;
        while (true) {
            double t = entry(idx);
            if (t != 0.0) {
                for (int s = 0; s < n; ++s) t *= x[idx[s]];
                sum += t;
            }
            int s = n - 1;
            while (s >= 0 && ++idx[s] == m) idx[s--] = 0;
            if (s < 0) break;
        }
        return sum;
    }

    const HomogeneousPolynomial& polynomial() const { return poly_; }

private:
    HomogeneousPolynomial poly_;
};

inline SymmetricTensor HomogeneousPolynomial::tensor_view() const {
    return SymmetricTensor(*this);
}

} // namespace tmodes
