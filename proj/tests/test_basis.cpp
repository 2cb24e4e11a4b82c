#include "sieve/basis.hpp"
#include "sieve/daubechies.hpp"
#include "sieve/error.hpp"
#include "sieve/gram.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace sieve;
using namespace sieve::test;

namespace {

// Hats on the knots 0, 1/3, 2/3, 1 (order 2, two interior knots), unscaled.
Eigen::Vector4d hats(double x) {
    auto hat = [](double x, double a, double b, double c) {
        if (x < a || x > c) return 0.0;
        if (x <= b) return b == a ? 1.0 : (x - a) / (b - a);
        return (c - x) / (c - b);
    };
    const double t = 1.0 / 3.0;
    Eigen::Vector4d v;
    v << (x <= t ? 1.0 - 3.0 * x : 0.0), hat(x, 0.0, t, 2 * t), hat(x, t, 2 * t, 1.0), (x >= 2 * t ? 3.0 * x - 2.0 : 0.0);
    return v;
}

}  // namespace

TEST_CASE("order-1 splines are scaled indicators") {
    const auto basis = build_basis(spline(1, 3));
    REQUIRE(basis.size() == 4);
    for (double x : {0.0, 0.1, 0.25, 0.3, 0.5, 0.74, 0.75, 0.99, 1.0}) {
        const auto b = basis.evaluate(x);
        const int cell = std::min(3, static_cast<int>(std::floor(4 * x)));
        for (int k = 0; k < 4; ++k) CHECK(b[k] == doctest::Approx(k == cell ? 2.0 : 0.0).epsilon(1e-12));
    }
}

TEST_CASE("Haar J=2 at 0.3") {
    const auto b = build_basis(wavelet(1, 2)).evaluate(0.3);
    REQUIRE(b.size() == 4);
    CHECK(std::abs(b[0]) < 1e-12);
    CHECK(std::abs(b[1] - 2.0) < 1e-12);
    CHECK(std::abs(b[2]) < 1e-12);
    CHECK(std::abs(b[3]) < 1e-12);
}

TEST_CASE("hat functions agree with the closed form") {
    const auto basis = build_basis(spline(2, 2));
    const auto at_third = basis.evaluate(1.0 / 3.0);
    CHECK((at_third - Eigen::Vector4d(0, 2, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const double x = u(rng);
        CHECK((basis.evaluate(x) - 2.0 * hats(x)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("spline partition of unity") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int r = 1; r <= 5; ++r) {
        for (int m : {0, 1, 4, 9}) {
            const auto basis = build_basis(spline(r, m));
            const double scale = std::sqrt(static_cast<double>(basis.size()));
            for (int i = 0; i < 50; ++i) {
                const double x = i < 2 ? static_cast<double>(i) : u(rng);
                CHECK(basis.evaluate(x).sum() / scale == doctest::Approx(1.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("hat gradient at 0.5") {
    const auto g = build_basis(spline(2, 2)).evaluate_gradient(0.5);
    REQUIRE(g.rows() == 4);
    REQUIRE(g.cols() == 1);
    CHECK((g.col(0) - Eigen::Vector4d(0, -6, 6, 0)).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("order-1 gradient vanishes") {
    const auto basis = build_basis(spline(1, 5));
    for (double x : {0.05, 0.2, 0.55, 0.9}) CHECK(basis.evaluate_gradient(x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("analytic gradients match central differences") {
    const std::vector<BasisSpec> specs = {spline(2, 3), spline(3, 6), spline(4, 5), spline(5, 2), power(7), trig(4)};
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    const double h = 1e-6;
    for (const auto& spec : specs) {
        const auto basis = build_basis(spec);
        double worst = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double x = u(rng);
            const Eigen::VectorXd fd = (basis.evaluate(x + h) - basis.evaluate(x - h)) / (2 * h);
            worst = std::max(worst, (basis.evaluate_gradient(x).col(0) - fd).cwiseAbs().maxCoeff());
        }
        CHECK(worst < 1e-5);
    }
}

TEST_CASE("tensor products are outer products with the first coordinate major") {
    const auto b2 = build_basis(spline(2, 2, 2));
    const auto b1 = build_basis(spline(2, 2, 1));
    REQUIRE(b2.size() == 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 50; ++i) {
        const std::vector<double> x{u(rng), u(rng)};
        const Eigen::VectorXd v = b2.evaluate(x);
        const Eigen::VectorXd a = b1.evaluate(x[0]);
        const Eigen::VectorXd b = b1.evaluate(x[1]);
        for (int j = 0; j < 4; ++j) {
            for (int k = 0; k < 4; ++k) CHECK(std::abs(v[4 * j + k] - a[j] * b[k]) < 1e-12);
        }
    }
}

TEST_CASE("nonzero values lie inside the declared support") {
    for (const auto& spec : {spline(3, 4), spline(2, 2, 2), wavelet(1, 3), wavelet(2, 3), wavelet(3, 4)}) {
        const auto basis = build_basis(spec);
        const auto points = uniform_points(300, spec.dim, 17);
        for (Eigen::Index i = 0; i < points.rows(); ++i) {
            const auto x = row_span(points, i);
            const auto b = basis.evaluate(x);
            for (int k = 0; k < basis.size(); ++k) {
                if (b[k] == 0.0) continue;
                const auto box = basis.support(k);
                for (int l = 0; l < spec.dim; ++l) {
                    CHECK(x[static_cast<std::size_t>(l)] >= box.lower[static_cast<std::size_t>(l)] - 1e-12);
                    CHECK(x[static_cast<std::size_t>(l)] <= box.upper[static_cast<std::size_t>(l)] + 1e-12);
                }
            }
        }
    }
}

TEST_CASE("sparse evaluation matches dense evaluation") {
    const auto basis = build_basis(wavelet(2, 4));
    const auto points = uniform_points(100, 1, 8);
    const auto dense = basis.design_matrix(points);
    const auto sparse = basis.sparse_design(points);
    REQUIRE(sparse.rows() == points.rows());
    Eigen::VectorXd c = Eigen::VectorXd::LinSpaced(basis.size(), -1.0, 2.0);
    for (Eigen::Index i = 0; i < points.rows(); ++i) CHECK(sparse.dot(i, c) == doctest::Approx(dense.row(i).dot(c)));
}

TEST_CASE("Haar scaling function needs no boundary functions") {
    const auto basis = build_basis(wavelet(1, 3));
    for (double x : {0.0, 0.1, 0.4, 0.6, 0.999}) {
        const auto b = basis.evaluate(x);
        CHECK(b.sum() == doctest::Approx(std::sqrt(8.0)));
        CHECK(b.cwiseAbs().maxCoeff() == doctest::Approx(std::sqrt(8.0)));
    }
}

TEST_CASE("interior Daubechies N=2 translates sum to one") {
    const auto table = tabulate_daubechies(2, 12);
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double x = i / 200.0;
        double s = 0.0;
        for (int k = -3; k <= 4; ++k) s += table.phi(x - k);
        worst = std::max(worst, std::abs(s - 1.0));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("Daubechies filters are normalized") {
    for (int n = 1; n <= 3; ++n) {
        const auto h = daubechies_filter(n);
        CHECK(h.size() == static_cast<std::size_t>(2 * n));
        double sum = 0.0;
        double sq = 0.0;
        for (double v : h) {
            sum += v;
            sq += v * v;
        }
        CHECK(sum == doctest::Approx(std::numbers::sqrt2).epsilon(1e-12));
        CHECK(sq == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("wavelet N=2 J=4 is orthonormal on the tabulation grid") {
    // Composite Simpson on cells of width 2^-(R+J) integrates products of the
    // piecewise-linear interpolants exactly.
    const auto basis = build_basis(wavelet(2, 4));
    REQUIRE(basis.size() == 16);
    const int cells = 1 << 16;
    const double h = 1.0 / cells;
    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(16, 16);
    Eigen::VectorXd left = basis.evaluate(0.0);
    for (int c = 0; c < cells; ++c) {
        const Eigen::VectorXd mid = basis.evaluate((c + 0.5) * h);
        const Eigen::VectorXd right = basis.evaluate(c + 1 == cells ? 1.0 : (c + 1) * h);
        gram += h / 6.0 * (left * left.transpose() + 4.0 * mid * mid.transpose() + right * right.transpose());
        left = right;
    }
    CHECK((gram - Eigen::MatrixXd::Identity(16, 16)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("zeta grows like sqrt(K) for splines and like K for power series") {
    for (int k : {8, 16, 32, 64}) {
        const double spline_zeta = zeta_constant(build_basis(spline(4, k - 4)));
        CHECK(spline_zeta / std::sqrt(static_cast<double>(k)) < 2.0);
        CHECK(spline_zeta / std::sqrt(static_cast<double>(k)) >= 1.0 - 1e-12);
        // Orthonormal Legendre: ||b(1)||^2 = sum (2j + 1) = K^2.
        CHECK(zeta_constant(build_basis(power(k - 1))) == doctest::Approx(k).epsilon(1e-9));
    }
}

TEST_CASE("weighting zeroes the basis outside the box") {
    auto spec = spline(3, 4);
    spec.weight = WeightBox{{0.1}, {0.9}};
    const auto basis = build_basis(spec);
    CHECK(basis.evaluate(0.05).cwiseAbs().maxCoeff() == 0.0);
    CHECK(basis.evaluate(0.95).cwiseAbs().maxCoeff() == 0.0);
    CHECK(basis.evaluate(0.5).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("invalid specs and points are rejected") {
    CHECK_THROWS_AS(build_basis(spline(0, 3)), ConfigError);
    CHECK_THROWS_AS(build_basis(spline(2, -1)), ConfigError);
    CHECK_THROWS_AS(build_basis(wavelet(4, 5)), ConfigError);
    CHECK_THROWS_AS(build_basis(wavelet(2, 2)), ConfigError);
    CHECK_THROWS_AS(build_basis(wavelet(3, 3)), ConfigError);
    auto bad_box = spline(2, 2);
    bad_box.weight = WeightBox{{0.6}, {0.4}};
    CHECK_THROWS_AS(build_basis(bad_box), ConfigError);
    const auto basis = build_basis(spline(2, 2));
    CHECK_THROWS_AS((void)basis.evaluate(1.5), DomainError);
    CHECK_THROWS_AS((void)basis.evaluate(-0.01), DomainError);
    const std::vector<double> two{0.5, 0.5};
    CHECK_THROWS_AS((void)basis.evaluate(two), DomainError);
}

TEST_CASE("key-value round trip") {
    auto spec = wavelet(2, 5, 2);
    spec.weight = WeightBox{{0.0, 0.1}, {1.0, 0.9}};
    const auto back = BasisSpec::from_key_values(spec.to_key_values());
    CHECK(back.family == Family::Wavelet);
    CHECK(back.vanishing_moments == 2);
    CHECK(back.level == 5);
    CHECK(back.dim == 2);
    REQUIRE(back.weight.has_value());
    CHECK(back.weight->upper[1] == 0.9);
    CHECK_THROWS_AS(BasisSpec::from_key_values({{"family", "bspline"}, {"colour", "red"}}), ConfigError);
    CHECK_THROWS_AS(BasisSpec::from_key_values({{"order", "3"}}), ConfigError);
}
