#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "tmodes/polynomial.hpp"
#include "oracles.hpp"

using namespace tmodes;
using Catch::Approx;

namespace {

HomogeneousPolynomial quartic_square_symmetric(double beta) {
    // (x^2 + y^2)^2 + beta x^2 y^2, expanded
    return HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{0, 4}, 1.0}, {{2, 2}, 2.0 + beta}});
}

HomogeneousPolynomial quartic_rect_symmetric(double alpha, double beta) {
    // x^4 + alpha y^4 + 2 beta x^2 y^2
    return HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{0, 4}, alpha}, {{2, 2}, 2.0 * beta}});
}

} // namespace

TEST_CASE("from_terms builds canonical term maps", "[polynomial]") {
    auto p = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}});
    REQUIRE(p.terms().size() == 1);
    REQUIRE(p.terms().at({4, 0}) == 1.0);

    auto v = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{0, 4}, 1.0}, {{2, 2}, 2.0}});
    REQUIRE(v.terms().size() == 3);
    REQUIRE(v.terms().at({2, 2}) == 2.0);

    SECTION("cancellation drops the monomial") {
        auto z = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{4, 0}, -1.0}});
        REQUIRE(z.terms().empty());
    }
    SECTION("duplicates are summed") {
        auto q = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{4, 0}, 2.5}});
        REQUIRE(q.terms().at({4, 0}) == 3.5);
    }
}

TEST_CASE("from_terms rejects malformed input", "[polynomial]") {
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(2, 4, {{{4, 0, 0}, 1.0}}), input_error);
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(2, 4, {{{3, 0}, 1.0}}), input_error);
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(2, 4, {{{5, -1}, 1.0}}), input_error);
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(2, 1, {{{1, 0}, 1.0}}), input_error);
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(2, 0, {}), input_error);
    REQUIRE_THROWS_AS(HomogeneousPolynomial::from_terms(0, 4, {}), input_error);
}

TEST_CASE("evaluate matches hand values", "[polynomial]") {
    auto v = quartic_rect_symmetric(0.25, 0.0);
    REQUIRE(v.evaluate(Eigen::Vector2d(0, 1)) == Approx(0.25).margin(1e-15));

    auto w = quartic_rect_symmetric(0.25, 0.5);
    REQUIRE(w.evaluate(Eigen::Vector2d(1, 1)) == Approx(2.25).margin(1e-15));

    REQUIRE(w.evaluate(Eigen::Vector2d(0, 0)) == 0.0);

    REQUIRE_THROWS_AS(w.evaluate(Eigen::Vector3d(1, 1, 1)), input_error);
}

TEST_CASE("gradient matches hand values", "[polynomial]") {
    auto p = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}, {{0, 4}, 1.0}});
    Eigen::VectorXd g = p.gradient(Eigen::Vector2d(1, 1));
    REQUIRE(g[0] == Approx(4.0).margin(1e-15));
    REQUIRE(g[1] == Approx(4.0).margin(1e-15));

    // d/dx [(x^2+y^2)^2 + x^2 y^2] = 4x^3 + 6xy^2 -> (4, 0) at (1, 0)
    auto v = quartic_square_symmetric(1.0);
    Eigen::VectorXd gv = v.gradient(Eigen::Vector2d(1, 0));
    REQUIRE(gv[0] == Approx(4.0).margin(1e-15));
    REQUIRE(gv[1] == 0.0);

    REQUIRE(v.gradient(Eigen::Vector2d(0, 0)).norm() == 0.0);
}

TEST_CASE("hessian matches hand values", "[polynomial]") {
    auto p = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}});
    Eigen::MatrixXd h = p.hessian(Eigen::Vector2d(1, 0));
    REQUIRE(h(0, 0) == Approx(12.0).margin(1e-15));
    REQUIRE(h(0, 1) == 0.0);
    REQUIRE(h(1, 1) == 0.0);

    auto q = HomogeneousPolynomial::from_terms(2, 2, {{{2, 0}, 0.5}, {{0, 2}, 1.0}});
    for (auto pt : {Eigen::Vector2d(1, 2), Eigen::Vector2d(-3, 0.5)}) {
        Eigen::MatrixXd hq = q.hessian(pt);
        REQUIRE(hq(0, 0) == Approx(1.0).margin(1e-15));
        REQUIRE(hq(1, 1) == Approx(2.0).margin(1e-15));
        REQUIRE(hq(0, 1) == 0.0);
    }

    auto v = quartic_square_symmetric(1.0);
    Eigen::MatrixXd hv = v.hessian(Eigen::Vector2d(1, 0));
    REQUIRE(hv(0, 0) == Approx(12.0).margin(1e-15));
    REQUIRE(hv(1, 1) == Approx(6.0).margin(1e-15));
    REQUIRE(hv(0, 1) == 0.0);
}

TEST_CASE("tensor view carries the multinomial normalization", "[polynomial]") {
    auto p = HomogeneousPolynomial::from_terms(2, 4, {{{4, 0}, 1.0}});
    auto t = p.tensor_view();
    const int i1111[] = {0, 0, 0, 0};
    const int i1122[] = {0, 0, 1, 1};
    REQUIRE(t.entry(i1111) == 1.0);
    REQUIRE(t.entry(i1122) == 0.0);

    auto q = HomogeneousPolynomial::from_terms(2, 4, {{{2, 2}, 2.0}});
    auto tq = q.tensor_view();
    // (1,1,2,2) has 6 distinct permutations; verified by exhaustive tuple count
    REQUIRE(oracles::count_tuples_with_signature({2, 2}) == 6);
    REQUIRE(tq.entry(i1122) == Approx(2.0 / 6.0).margin(1e-16));

    SECTION("entries are permutation invariant") {
        const int perm_a[] = {0, 1, 0, 1};
        const int perm_b[] = {1, 1, 0, 0};
        REQUIRE(tq.entry(perm_a) == tq.entry(i1122));
        REQUIRE(tq.entry(perm_b) == tq.entry(i1122));
    }

    SECTION("full contraction reproduces evaluation") {
        std::mt19937_64 rng(42);
        auto v = quartic_square_symmetric(1.0);
        auto tv = v.tensor_view();
        for (int k = 0; k < 100; ++k) {
            Eigen::VectorXd x = oracles::random_point(2, rng);
            REQUIRE(tv.contract(x) == Approx(v.evaluate(x)).margin(1e-12));
        }
    }
}

TEST_CASE("homogeneity and Euler identity", "[polynomial]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> sdist(0.2, 3.0);
    for (int k = 0; k < 100; ++k) {
        auto p = oracles::random_polynomial(2 + k % 2, 4, rng);
        Eigen::VectorXd x = oracles::random_point(p.dim(), rng);
        double s = sdist(rng);

        double lhs = p.evaluate(s * x);
        double rhs = std::pow(s, 4) * p.evaluate(x);
        REQUIRE(lhs == Approx(rhs).epsilon(1e-12).margin(1e-12));

        double euler = x.dot(p.gradient(x));
        REQUIRE(euler == Approx(4.0 * p.evaluate(x)).epsilon(1e-12).margin(1e-12));
    }
}

TEST_CASE("gradient and hessian agree with finite differences", "[polynomial]") {
    std::mt19937_64 rng(11);
    for (int k = 0; k < 25; ++k) {
        auto p = oracles::random_polynomial(2 + k % 3, 4, rng);
        Eigen::VectorXd x = oracles::random_point(p.dim(), rng);

        Eigen::VectorXd g = p.gradient(x);
        Eigen::VectorXd gfd = oracles::fd_gradient([&p](const Eigen::VectorXd& y) { return p.evaluate(y); }, x);
        for (int i = 0; i < g.size(); ++i)
            REQUIRE(g[i] == Approx(gfd[i]).epsilon(1e-6).margin(1e-6));

        Eigen::MatrixXd h = p.hessian(x);
        REQUIRE((h - h.transpose()).norm() == 0.0);  // symmetric by construction
        Eigen::MatrixXd hfd =
            oracles::fd_jacobian([&p](const Eigen::VectorXd& y) { return p.gradient(y); }, x);
        for (int i = 0; i < h.rows(); ++i)
            for (int j = 0; j < h.cols(); ++j)
                REQUIRE(h(i, j) == Approx(hfd(i, j)).epsilon(1e-5).margin(1e-5));
    }
}
