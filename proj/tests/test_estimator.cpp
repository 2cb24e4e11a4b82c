#include "sieve/error.hpp"
#include "sieve/estimator.hpp"
#include "sieve/gram.hpp"
#include "sieve/quadrature.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace sieve;
using namespace sieve::test;

namespace {

Eigen::VectorXd noise(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z;
    Eigen::VectorXd e(n);
    for (Eigen::Index i = 0; i < n; ++i) e[i] = z(rng);
    return e;
}

// Lawson's iteratively reweighted least squares for the best uniform
// approximation on a grid; returns the attained sup error (an upper bound
// on the true minimum that converges to it).
double best_uniform_error(const BasisSystem& basis, const PointSet& grid, const Function& h) {
    const Eigen::MatrixXd b = basis.design_matrix(grid);
    const Eigen::VectorXd y = evaluate_function(h, grid);
    Eigen::VectorXd w = Eigen::VectorXd::Constant(grid.rows(), 1.0 / static_cast<double>(grid.rows()));
    double best = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 400; ++it) {
        const Eigen::VectorXd sw = w.cwiseSqrt();
        const Eigen::VectorXd c = (sw.asDiagonal() * b).colPivHouseholderQr().solve(sw.asDiagonal() * y);
        const Eigen::VectorXd r = (b * c - y).cwiseAbs();
        best = std::min(best, r.maxCoeff());
        w = w.cwiseProduct(r);
        w /= w.sum();
    }
    return best;
}

}  // namespace

TEST_CASE("constant basis fits the sample mean") {
    const auto basis = build_basis(power(0));
    const auto x = uniform_points(25, 1, 1);
    const Eigen::VectorXd y = noise(25, 2);
    const auto f = fit(basis, x, y);
    CHECK(f.coeffs[0] == doctest::Approx(y.mean()).epsilon(1e-12));
    CHECK(f(0.77) == doctest::Approx(y.mean()).epsilon(1e-12));
}

TEST_CASE("functions in the span are reproduced") {
    const auto basis = build_basis(spline(2, 3));
    const auto x = uniform_points(60, 1, 3);
    const Function h0 = [](std::span<const double> p) { return 1.5 - 2.0 * p[0]; };
    const auto f = fit(basis, x, evaluate_function(h0, x));
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(std::abs(f.fitted[i] - h0(row_span(x, i))) < 1e-10);
    for (double t : {0.0, 0.3, 0.91, 1.0}) CHECK(std::abs(f(t) - (1.5 - 2.0 * t)) < 1e-10);
    const auto oracle = project_oracle(basis, x, h0);
    CHECK(oracle.fit.residuals.cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("balanced Haar design with Y = 1..4") {
    const auto basis = build_basis(wavelet(1, 2));
    const auto f = fit(basis, column({0.1, 0.3, 0.6, 0.8}), Eigen::Vector4d(1, 2, 3, 4));
    CHECK((f.coeffs - Eigen::Vector4d(0.5, 1.0, 1.5, 2.0)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(f.rank == 4);
    CHECK_FALSE(f.rank_deficient);
}

TEST_CASE("least-squares geometry") {
    const auto basis = build_basis(spline(3, 5));
    const auto x = uniform_points(300, 1, 4);
    const SeriesRegression reg(basis, x);
    const Eigen::VectorXd y1 = noise(300, 5);
    const Eigen::VectorXd y2 = noise(300, 6);
    const auto f1 = reg.fit(y1);
    const auto f2 = reg.fit(y2);

    SUBCASE("residuals are orthogonal to the design") {
        CHECK((reg.design().transpose() * f1.residuals).cwiseAbs().maxCoeff() < 1e-9);
    }
    SUBCASE("projection is idempotent") {
        CHECK((reg.fit(f1.fitted).fitted - f1.fitted).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("fit is linear in Y") {
        const auto f = reg.fit(y1 + 2.0 * y2);
        CHECK((f.coeffs - f1.coeffs - 2.0 * f2.coeffs).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("variance term is the fit of the noise") {
        const Function h0 = [](std::span<const double> p) { return std::sin(2 * M_PI * p[0]); };
        const Eigen::VectorXd h = evaluate_function(h0, x);
        const auto full = reg.fit(h + y1);
        const auto tilde = reg.fit(h);
        const auto grid = evaluation_grid(basis);
        const double lhs = sup_error(full.as_function(), tilde.as_function(), grid);
        const Function zero = [](std::span<const double>) { return 0.0; };
        CHECK(lhs == doctest::Approx(sup_error(f1.as_function(), zero, grid)).epsilon(1e-10));
    }
    SUBCASE("scaled Gram pseudo-inverse") {
        const Eigen::MatrixXd g = reg.design().transpose() * reg.design() / 300.0;
        CHECK((reg.scaled_gram_pinv() * g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("fitted values do not depend on the parameterization of the span") {
    // Cubic splines without interior knots and cubic Legendre polynomials span the same space.
    const auto x = uniform_points(80, 1, 9);
    const Eigen::VectorXd y = noise(80, 10);
    const auto a = fit(build_basis(spline(4, 0)), x, y);
    const auto b = fit(build_basis(power(3)), x, y);
    CHECK((a.fitted - b.fitted).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(std::abs(a(0.123) - b(0.123)) < 1e-10);
}

TEST_CASE("weighted fits vanish outside the trimming box") {
    auto spec = spline(3, 4);
    spec.weight = WeightBox{{0.2}, {0.8}};
    const auto basis = build_basis(spec);
    const auto x = uniform_points(200, 1, 12);
    const auto f = fit(basis, x, noise(200, 13));
    CHECK(f(0.1) == 0.0);
    CHECK(f(0.9) == 0.0);
    const auto grid = weighted_grid(basis);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        CHECK(grid(i, 0) >= 0.2);
        CHECK(grid(i, 0) <= 0.8);
    }
}

TEST_CASE("empirical and population norms agree up to the Gram deviation") {
    const auto basis = build_basis(spline(3, 6));
    const auto x = uniform_points(500, 1, 14);
    const auto summary = summarize_gram(basis, x, Density::uniform());
    std::mt19937_64 rng(15);
    std::normal_distribution<double> z;
    for (int trial = 0; trial < 200; ++trial) {
        Eigen::VectorXd c(basis.size());
        for (auto& v : c) v = z(rng);
        const double empirical = c.dot(summary.empirical * c);
        const double population = c.dot(summary.theoretical * c);
        CHECK(std::abs(empirical / population - 1.0) <= summary.deviation + 1e-12);
    }
    const auto f = fit(basis, x, noise(500, 16));
    CHECK(std::isnan(f.deviation));
    const Density unif = Density::uniform();
    CHECK(fit(basis, x, noise(500, 16), &unif).deviation == doctest::Approx(summary.deviation));
}

TEST_CASE("projection error is within (1 + Lebesgue) of the best uniform approximation") {
    const auto basis = build_basis(spline(3, 5));
    const auto x = uniform_points(400, 1, 17);
    const Function h0 = [](std::span<const double> p) { return std::exp(p[0]) * std::sin(3.0 * p[0]); };
    const auto projection = project_oracle(basis, x, h0);
    const auto grid = evaluation_grid(basis);
    const double err = sup_error(projection.fit.as_function(), h0, grid);
    const double lebesgue = lebesgue_constant_empirical(basis, x).value;
    const double best = best_uniform_error(basis, grid, h0);
    CHECK(err <= (1.0 + lebesgue) * best);
    CHECK(err >= best * (1.0 - 1e-6));
}

TEST_CASE("rank-deficient designs are flagged") {
    const auto basis = build_basis(wavelet(1, 3));
    const auto x = column({0.01, 0.05, 0.2, 0.3, 0.33});
    const auto f = fit(basis, x, Eigen::VectorXd::LinSpaced(5, 1.0, 5.0));
    CHECK(f.rank_deficient);
    CHECK(f.rank == 3);
    CHECK(f.coeffs.tail(5).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(f(0.02) == doctest::Approx(1.5));
}

TEST_CASE("error norms") {
    const auto basis = build_basis(spline(3, 4));
    const auto grid = evaluation_grid(basis);
    const auto rule = error_quadrature(basis);
    const Density unif = Density::uniform();
    const Function s = [](std::span<const double> p) { return std::sin(2 * M_PI * p[0]); };
    const Function zero = [](std::span<const double>) { return 0.0; };
    const Function shifted = [&](std::span<const double> p) { return s(p) + 0.7; };
    CHECK(sup_error(s, s, grid) == 0.0);
    CHECK(l2_error(s, s, unif, rule) == 0.0);
    CHECK(sup_error(shifted, s, grid) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(l2_error(shifted, s, unif, rule) == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(std::abs(l2_error(s, zero, unif, rule) - 1.0 / std::sqrt(2.0)) < 1e-10);
}

TEST_CASE("sample and response sizes must agree") {
    const auto basis = build_basis(spline(2, 2));
    CHECK_THROWS_AS(fit(basis, uniform_points(10, 1, 1), Eigen::VectorXd::Zero(9)), ConfigError);
}
