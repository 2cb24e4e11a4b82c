#include "sieve/error.hpp"
#include "sieve/gram.hpp"
#include "sieve/inference.hpp"
#include "sieve/linalg.hpp"

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

const Function kOne = [](std::span<const double>) { return 1.0; };

}  // namespace

TEST_CASE("functional kinds and names") {
    CHECK(FunctionalSpec::point({0.3}).linear());
    CHECK_FALSE(FunctionalSpec::exp_point({0.3}).linear());
    CHECK(to_string(FunctionalSpec::Kind::Integral) == "integral");
    CHECK(functional_kind_from_string("exp_point") == FunctionalSpec::Kind::NonlinearExpEval);
    CHECK_THROWS_AS(functional_kind_from_string("median"), ConfigError);
    const auto basis = build_basis(spline(2, 2));
    CHECK_THROWS_AS(evaluate_functional(FunctionalSpec::point({0.3, 0.4}), basis, Eigen::VectorXd::Zero(4)),
                    ConfigError);
}

TEST_CASE("point evaluation is linear with derivative b(x0)") {
    const auto basis = build_basis(spline(3, 4));
    const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(basis.size(), -1.0, 1.0);
    const auto f = evaluate_functional(FunctionalSpec::point({0.42}), basis, c);
    CHECK(f.value == doctest::Approx(basis.evaluate(0.42).dot(c)));
    CHECK((f.derivative - basis.evaluate(0.42)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("representer under an orthonormal basis") {
    const auto basis = build_basis(wavelet(1, 3));
    const Eigen::VectorXd b = basis.evaluate(0.61);
    const auto r = riesz_representer(Eigen::MatrixXd::Identity(8, 8), b);
    CHECK((r.coeffs - b).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(r.norm2 == doctest::Approx(b.squaredNorm()));
    CHECK_FALSE(r.rank_deficient);
}

TEST_CASE("integral representer reproduces integrals of span elements") {
    const auto basis = build_basis(spline(3, 4));
    const auto g = theoretical_gram(basis, Density::uniform());
    const auto spec = FunctionalSpec::integral(kOne);
    const auto d = evaluate_functional(spec, basis, Eigen::VectorXd::Zero(basis.size()));
    const auto r = riesz_representer(g, d.derivative);
    // Constants lie in the span, so the representer is the function 1.
    CHECK(r.norm2 == doctest::Approx(1.0).epsilon(1e-10));
    for (double x : {0.0, 0.37, 0.8, 1.0}) CHECK(basis.evaluate(x).dot(r.coeffs) == doctest::Approx(1.0).epsilon(1e-9));

    std::mt19937_64 rng(4);
    std::normal_distribution<double> z;
    const int cells = 200000;
    for (int trial = 0; trial < 20; ++trial) {
        Eigen::VectorXd v(basis.size());
        for (auto& e : v) e = z(rng);
        double integral = 0.0;  // midpoint rule oracle
        for (int i = 0; i < cells; ++i) integral += basis.evaluate((i + 0.5) / cells).dot(v) / cells;
        CHECK(r.coeffs.dot(g * v) == doctest::Approx(integral).epsilon(1e-8));
        CHECK(evaluate_functional(spec, basis, v).value == doctest::Approx(integral).epsilon(1e-8));
    }
}

TEST_CASE("constant basis point representer") {
    const auto basis = build_basis(power(0));
    const auto d = evaluate_functional(FunctionalSpec::point({0.9}), basis, Eigen::VectorXd::Constant(1, 3.0));
    CHECK(d.value == doctest::Approx(3.0));
    const auto r = riesz_representer(theoretical_gram(basis, Density::uniform()), d.derivative);
    CHECK(r.coeffs[0] == doctest::Approx(1.0));
}

TEST_CASE("oracle variance of Haar point evaluation") {
    const auto basis = build_basis(wavelet(1, 2));
    const Eigen::VectorXd b = basis.evaluate(0.3);
    CHECK(oracle_variance(basis, b, Density::uniform(), kOne) == doctest::Approx(4.0).epsilon(1e-12));
    const auto orth = build_basis(wavelet(2, 4));
    const Eigen::VectorXd bo = orth.evaluate(0.37);
    CHECK(oracle_variance(orth, bo, Density::uniform(), kOne) == doctest::Approx(bo.squaredNorm()).epsilon(1e-5));
}

TEST_CASE("exponential functional") {
    const auto basis = build_basis(spline(3, 3));
    const auto spec = FunctionalSpec::exp_point({0.55});
    const auto zero = evaluate_functional(spec, basis, Eigen::VectorXd::Zero(basis.size()));
    CHECK(zero.value == doctest::Approx(1.0));
    CHECK((zero.derivative - basis.evaluate(0.55)).cwiseAbs().maxCoeff() < 1e-14);

    // Constants: coefficients c / sqrt(K) times the partition of unity.
    const double k = basis.size();
    const auto constant = evaluate_functional(spec, basis, Eigen::VectorXd::Constant(basis.size(), 0.7 / std::sqrt(k)));
    CHECK(constant.value == doctest::Approx(std::exp(0.7)).epsilon(1e-12));

    const Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(basis.size(), -0.5, 0.8);
    const auto f = evaluate_functional(spec, basis, c);
    const double h = 1e-6;
    for (int j = 0; j < basis.size(); ++j) {
        Eigen::VectorXd up = c;
        Eigen::VectorXd down = c;
        up[j] += h;
        down[j] -= h;
        const double fd =
            (evaluate_functional(spec, basis, up).value - evaluate_functional(spec, basis, down).value) / (2 * h);
        CHECK(std::abs(fd - f.derivative[j]) < 1e-6);
    }

    const auto huge = evaluate_functional(spec, basis, Eigen::VectorXd::Constant(basis.size(), 100.0));
    CHECK(huge.clamped);
    CHECK(huge.value == doctest::Approx(std::exp(50.0)));
}

TEST_CASE("plug-in variance") {
    const auto basis = build_basis(spline(3, 4));
    const auto x = uniform_points(400, 1, 21);
    const SeriesRegression reg(basis, x);
    const Function h0 = [](std::span<const double> p) { return 1.0 + p[0] * p[0]; };  // in the span
    const Eigen::VectorXd h = evaluate_function(h0, x);
    const Eigen::VectorXd e = noise(400, 22);
    const Eigen::VectorXd deriv = basis.evaluate(0.37);

    SUBCASE("doubling the noise scales V exactly by four") {
        const double v1 = plugin_variance(reg, reg.fit(h + e), deriv);
        const double v2 = plugin_variance(reg, reg.fit(h + 2.0 * e), deriv);
        CHECK(v2 == doctest::Approx(4.0 * v1).epsilon(1e-12));
    }
    SUBCASE("constant residuals factor out") {
        auto f = reg.fit(h + e);
        f.residuals.setConstant(0.3);
        const Eigen::VectorXd v = reg.design() * (reg.scaled_gram_pinv() * deriv);
        CHECK(plugin_variance(reg, f, deriv) == doctest::Approx(0.09 * v.squaredNorm() / 400.0).epsilon(1e-12));
    }
    SUBCASE("noiseless data is degenerate") {
        CHECK_THROWS_AS(plugin_variance(reg, reg.fit(h), deriv), NumericError);
    }
    SUBCASE("variance does not depend on the parameterization") {
        const SeriesRegression a(build_basis(spline(4, 0)), x);
        const SeriesRegression b(build_basis(power(3)), x);
        const Eigen::VectorXd y = h + e;
        const auto fa = a.fit(y);
        const auto fb = b.fit(y);
        const auto ra = analyze_functional(a, fa, FunctionalSpec::point({0.37}), 0.95);
        const auto rb = analyze_functional(b, fb, FunctionalSpec::point({0.37}), 0.95);
        CHECK(ra.fhat == doctest::Approx(rb.fhat).epsilon(1e-10));
        CHECK(ra.vk_hat == doctest::Approx(rb.vk_hat).epsilon(1e-8));
    }
    SUBCASE("omega-hat sandwich matches the plug-in variance") {
        const auto f = reg.fit(h + e);
        const Eigen::MatrixXd g = reg.design().transpose() * reg.design() / 400.0;
        const Eigen::MatrixXd om = omega_hat(reg, f, g);
        const Eigen::VectorXd w = inverse_sqrt(g) * deriv;
        CHECK(w.dot(om * w) == doctest::Approx(plugin_variance(reg, f, deriv)).epsilon(1e-9));
    }
}

TEST_CASE("t statistic and interval") {
    CHECK(t_statistic(1.2, 1.2, 3.0, 100) == 0.0);
    CHECK(t_statistic(1.5, 1.0, 4.0, 100) == doctest::Approx(2.5));
    const auto [lo, hi] = confidence_interval(2.0, 4.0, 100, 0.95);
    CHECK(hi - 2.0 == doctest::Approx(1.959963984540054 * 0.2).epsilon(1e-12));
    CHECK(2.0 - lo == doctest::Approx(hi - 2.0));
    CHECK_THROWS_AS(t_statistic(1.0, 0.0, 0.0, 10), NumericError);
    CHECK_THROWS_AS(confidence_interval(1.0, 1.0, 10, 1.5), ConfigError);
}

TEST_CASE("analyze_functional assembles the report") {
    const auto basis = build_basis(wavelet(1, 3));
    const auto x = uniform_points(500, 1, 30);
    const SeriesRegression reg(basis, x);
    const Eigen::VectorXd y = noise(500, 31);
    const auto f = reg.fit(y);
    const auto r = analyze_functional(reg, f, FunctionalSpec::point({0.37}), 0.9, 0.0);
    REQUIRE(r.tstat.has_value());
    CHECK(*r.tstat == doctest::Approx(t_statistic(r.fhat, 0.0, r.vk_hat, 500)));
    CHECK(r.lo < r.fhat);
    CHECK(r.hi > r.fhat);
    CHECK(r.n == 500);
    CHECK_FALSE(r.rank_deficient);
    const auto no_truth = analyze_functional(reg, f, FunctionalSpec::point({0.37}), 0.9);
    CHECK_FALSE(no_truth.tstat.has_value());
}

TEST_CASE("functional truths") {
    const auto basis = build_basis(spline(3, 4));
    const Function h0 = [](std::span<const double> p) { return std::sin(2 * M_PI * p[0]) + p[0]; };
    CHECK(functional_truth(FunctionalSpec::point({0.25}), basis, h0) == doctest::Approx(1.25));
    CHECK(functional_truth(FunctionalSpec::exp_point({0.25}), basis, h0) == doctest::Approx(std::exp(1.25)));
    CHECK(functional_truth(FunctionalSpec::integral(kOne), basis, h0) == doctest::Approx(0.5).epsilon(1e-12));
}
