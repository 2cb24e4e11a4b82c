#include "sieve/dgp.hpp"
#include "sieve/error.hpp"
#include "sieve/parallel.hpp"
#include "sieve/stats.hpp"
#include "sieve/study.hpp"

#include "test_util.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <cmath>

using namespace sieve;
using namespace sieve::test;

namespace {

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

std::vector<double> first_column(const PointSet& x, Eigen::Index stride = 1) {
    std::vector<double> out;
    for (Eigen::Index i = 0; i < x.rows(); i += stride) out.push_back(x(i, 0));
    return out;
}

double kurtosis(const std::vector<double>& v) {
    const double m = mean(v);
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : v) {
        m2 += (x - m) * (x - m);
        m4 += std::pow(x - m, 4);
    }
    m2 /= static_cast<double>(v.size());
    m4 /= static_cast<double>(v.size());
    return m4 / (m2 * m2);
}

}  // namespace

// ------------------------------------------------------------------ seeding

TEST_CASE("derived seeds are deterministic and distinct") {
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 0, 0) != derive_seed(2, 0, 0));
    std::vector<int> hits(100, 0);
    parallel_for(100, 4, [&](int i) { hits[static_cast<std::size_t>(i)] += 1; });
    for (int h : hits) CHECK(h == 1);
    CHECK_THROWS_AS(parallel_for(10, 3, [](int i) {
                        if (i == 7) throw NumericError("boom");
                    }),
                    NumericError);
}

// ---------------------------------------------------------------------- dgp

TEST_CASE("AR copula with rho = 0 reproduces the i.i.d. stream") {
    const auto a = gen_regressors(RegressorKind::ArCopula, 0.0, 2, 500, 42);
    const auto b = gen_regressors(RegressorKind::IidUniform, 0.0, 2, 500, 42);
    CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("zero noise gives exact responses") {
    DgpSpec d;
    d.sigma = 0.0;
    const auto s = gen_sample(d, 300, 5);
    CHECK((s.y - s.h0).cwiseAbs().maxCoeff() == 0.0);
    for (Eigen::Index i = 0; i < 300; ++i) CHECK(s.h0[i] == d.h0_value(row_span(s.x, i)));
}

TEST_CASE("changing the error law leaves the regressors unchanged") {
    DgpSpec a;
    DgpSpec b;
    b.error = ErrorKind::StudentT;
    b.df = 3.0;
    CHECK((gen_sample(a, 200, 8).x - gen_sample(b, 200, 8).x).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("marginals are uniform") {
    const auto iid = first_column(gen_regressors(RegressorKind::IidUniform, 0.0, 1, 100000, 3));
    CHECK(ks_test_uniform(iid).statistic < 1.63 / std::sqrt(100000.0));
    // Thinning by 50 makes the AR(0.7) draws practically independent (0.7^50 ~ 2e-8).
    const auto ar = first_column(gen_regressors(RegressorKind::ArCopula, 0.7, 1, 500000, 4), 50);
    CHECK(ks_test_uniform(ar).statistic < 1.63 / std::sqrt(static_cast<double>(ar.size())));
}

TEST_CASE("AR copula has the requested latent autocorrelation") {
    const auto x = first_column(gen_regressors(RegressorKind::ArCopula, 0.7, 1, 100000, 6));
    std::vector<double> latent;
    const boost::math::normal normal;
    for (double u : x) latent.push_back(boost::math::quantile(normal, u));
    CHECK(autocorrelation(latent, 1) == doctest::Approx(0.7).epsilon(0.03));
    CHECK(autocorrelation(latent, 2) == doctest::Approx(0.49).epsilon(0.05));
    const auto iid = first_column(gen_regressors(RegressorKind::IidUniform, 0.0, 1, 100000, 6));
    CHECK(std::abs(autocorrelation(iid, 1)) < 4.0 / std::sqrt(100000.0));
}

TEST_CASE("errors form a martingale difference sequence") {
    DgpSpec d;
    d.regressor = RegressorKind::ArCopula;
    d.rho = 0.7;
    d.error = ErrorKind::Heteroskedastic;
    const auto s = gen_sample(d, 100000, 12);
    const auto e = to_vector(s.errors);
    const double bound = 4.0 / std::sqrt(100000.0);
    CHECK(std::abs(autocorrelation(e, 1)) < bound);
    CHECK(std::abs(autocorrelation(e, 2)) < bound);
    CHECK(std::abs(correlation(e, first_column(s.x))) < bound);
    std::vector<double> lagged_sq;
    std::vector<double> current;
    for (std::size_t i = 1; i < e.size(); ++i) {
        current.push_back(e[i]);
        lagged_sq.push_back(e[i - 1] * e[i - 1]);
    }
    CHECK(std::abs(correlation(current, lagged_sq)) < bound);
}

TEST_CASE("heteroskedastic errors follow sigma(x)") {
    DgpSpec d;
    d.error = ErrorKind::Heteroskedastic;
    const auto s = gen_sample(d, 200000, 13);
    double low = 0.0;
    double mid = 0.0;
    int nl = 0;
    int nm = 0;
    for (Eigen::Index i = 0; i < s.x.rows(); ++i) {
        const double x = s.x(i, 0);
        if (x < 0.05) {
            low += s.errors[i] * s.errors[i];
            ++nl;
        } else if (std::abs(x - 0.5) < 0.025) {
            mid += s.errors[i] * s.errors[i];
            ++nm;
        }
    }
    const std::vector<double> x_low{0.025};
    const std::vector<double> x_mid{0.5};
    CHECK(low / nl == doctest::Approx(d.conditional_variance(x_low)).epsilon(0.1));
    CHECK(mid / nm == doctest::Approx(d.conditional_variance(x_mid)).epsilon(0.1));
    CHECK(d.conditional_variance(x_mid) == doctest::Approx(0.5625));
}

TEST_CASE("Student-t(3) errors: finite variance, diverging kurtosis") {
    DgpSpec d;
    d.error = ErrorKind::StudentT;
    d.df = 3.0;
    d.scale = 1.0;
    const auto e = to_vector(gen_sample(d, 1000000, 14).errors);
    CHECK(std::abs(mean(e)) < 0.05 * std::sqrt(3.0));
    double var = 0.0;
    for (double v : e) var += v * v;
    var /= static_cast<double>(e.size());
    CHECK(var == doctest::Approx(3.0).epsilon(0.05));
    const std::vector<double> x{0.3};
    CHECK(d.conditional_variance(x) == doctest::Approx(3.0));

    auto batch_kurtosis = [&](std::size_t size) {
        std::vector<double> k;
        for (std::size_t start = 0; start + size <= e.size(); start += size) {
            k.push_back(kurtosis({e.begin() + static_cast<std::ptrdiff_t>(start),
                                  e.begin() + static_cast<std::ptrdiff_t>(start + size)}));
        }
        return median(k);
    };
    const double small = batch_kurtosis(1000);
    const double large = batch_kurtosis(100000);
    CHECK(large > small);
    CHECK(large > 6.0);
}

TEST_CASE("test functions") {
    DgpSpec d;
    d.h0 = TestFunction::Kink;
    d.smoothness = 2.0;
    d.kink_amplitude = 4.0;
    const double c = d.kink_location;
    auto kink_part = [&](double x) {
        const std::vector<double> p{x};
        return d.h0_value(p) - std::sin(2 * M_PI * x);
    };
    CHECK(kink_part(c + 0.1) == doctest::Approx(4.0 * 0.01));
    CHECK(kink_part(c - 0.1) == doctest::Approx(-4.0 * 0.01));
    CHECK(d.declared_smoothness() == 2.0);

    d.smoothness = 1.5;
    CHECK(kink_part(c + 0.04) == doctest::Approx(4.0 * std::pow(0.04, 1.5)));
    CHECK(kink_part(c - 0.04) == doctest::Approx(4.0 * std::pow(0.04, 1.5)));

    DgpSpec smooth;
    smooth.dim = 2;
    const std::vector<double> p{0.25, 0.5};
    CHECK(smooth.h0_value(p) == doctest::Approx(1.0 + 0.3 * std::cos(1.25) + 0.3 * std::cos(2.5)));
    CHECK(std::isinf(smooth.declared_smoothness()));
}

TEST_CASE("dgp key-value form") {
    DgpSpec d;
    d.regressor = RegressorKind::ArCopula;
    d.rho = 0.4;
    d.error = ErrorKind::StudentT;
    d.df = 4.0;
    const auto back = DgpSpec::from_key_values(d.to_key_values());
    CHECK(back.regressor == RegressorKind::ArCopula);
    CHECK(back.rho == 0.4);
    CHECK(back.df == 4.0);
    CHECK_THROWS_AS(DgpSpec::from_key_values({{"error", "student_t"}, {"df", "2"}}), ConfigError);
    CHECK_THROWS_AS(DgpSpec::from_key_values({{"rho", "0.5"}}), ConfigError);
    CHECK_THROWS_AS(DgpSpec::from_key_values({{"regressor", "ar_copula"}, {"rho", "1"}}), ConfigError);
    CHECK_THROWS_AS(DgpSpec::from_key_values({{"noise", "1"}}), ConfigError);
}

// -------------------------------------------------------------------- stats

TEST_CASE("descriptive statistics and line fits") {
    CHECK(median({3.0, 1.0, 2.0}) == 2.0);
    CHECK(median({4.0, 1.0, 2.0, 3.0}) == 2.5);
    CHECK(mean({1.0, 2.0, 6.0}) == 3.0);
    const auto f = fit_line({1, 2, 3, 4}, {3, 5, 7, 9});
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.r2 == doctest::Approx(1.0));
    CHECK(f.slope_se == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(correlation({1, 2, 3}, {2, 4, 6}) == doctest::Approx(1.0));
}

TEST_CASE("Kolmogorov-Smirnov") {
    CHECK(kolmogorov_survival(1.63) == doctest::Approx(0.0098).epsilon(0.02));
    CHECK(kolmogorov_survival(0.0) == doctest::Approx(1.0));
    const auto exact = ks_test_uniform({0.1, 0.3, 0.5, 0.7, 0.9});
    CHECK(exact.statistic == doctest::Approx(0.1));
    CHECK(exact.p_value > 0.99);
    DgpSpec d;
    const auto e = to_vector(gen_sample(d, 5000, 15).errors);
    CHECK(ks_test_normal(e).p_value > 0.01);
    std::vector<double> shifted = e;
    for (auto& v : shifted) v += 0.2;
    CHECK(ks_test_normal(shifted).p_value < 1e-6);
}

// ------------------------------------------------------------------ studies

TEST_CASE("K rule and basis sizing") {
    const KRule rule{2.0, 0.2};
    CHECK(rule.target(2000) == static_cast<int>(std::lround(2.0 * std::pow(2000.0 / std::log(2000.0), 0.2))));
    CHECK(KRule{0.01, 0.2}.target(100) == 1);
    CHECK(basis_for_size(spline(3, 0), 9).interior_knots == 6);
    CHECK(basis_for_size(power(1), 8).degree == 7);
    CHECK(basis_for_size(wavelet(1, 2), 128).level == 7);
    CHECK(basis_for_size(wavelet(1, 2), 100).level == 7);
    CHECK(basis_for_size(wavelet(2, 3), 2).level == 3);
    CHECK(basis_for_size(trig(1), 9).degree == 4);
    CHECK(basis_label(basis_from_label("bspline4")) == "bspline4");
    CHECK(basis_from_label("haar").family == Family::Wavelet);
    CHECK_THROWS_AS(basis_from_label("fourier"), ConfigError);
}

TEST_CASE("synthetic oracle recovers the slope exactly") {
    RateStudyConfig c;
    c.study.n_grid = {2000, 4000, 8000, 16000, 32000};
    c.study.reps = 3;
    c.basis = spline(3, 0);
    c.krule = KRule{2.0, 0.2};
    c.synthetic_oracle = true;
    const auto r = rate_study(c);
    CHECK(std::abs(r.sup_fit.slope + 0.4) < 1e-12);
    CHECK(std::abs(r.l2_fit.slope + 0.4) < 1e-12);
    CHECK(r.levels.size() == 5);
}

TEST_CASE("rate study is deterministic across thread counts") {
    RateStudyConfig c;
    c.study.n_grid = {500, 1000};
    c.study.reps = 4;
    c.study.seed = 3;
    c.basis = spline(3, 0);
    c.krule = KRule{2.0, 0.2};
    c.dgp.h0 = TestFunction::Kink;
    const auto a = rate_study(c);
    c.study.threads = 3;
    const auto b = rate_study(c);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].sup_error == b.rows[i].sup_error);
        CHECK(a.rows[i].l2_error == b.rows[i].l2_error);
    }
    CHECK(a.sup_fit.slope == b.sup_fit.slope);
}

TEST_CASE("stability study: Haar rows, power versus splines, dev scaling") {
    StabilityStudyConfig c;
    c.study.n_grid = {1000, 4000};
    c.study.reps = 20;
    c.study.seed = 5;
    c.bases = {basis_from_label("haar"), basis_from_label("bspline3"), basis_from_label("power")};
    c.k_values = {8, 16};
    const auto r = stability_study(c);
    for (const auto& row : r.rows) {
        if (row.basis == "wavelet1") CHECK(row.lebesgue == doctest::Approx(1.0).epsilon(1e-9));
    }
    auto cell = [&](const std::string& basis, int k, Eigen::Index n) {
        for (const auto& c : r.cells) {
            if (c.basis == basis && c.k == k && c.n == n) return c;
        }
        FAIL("missing cell");
        return StabilityCell{};
    };
    for (int k : {8, 16}) {
        CHECK(cell("power", k, 1000).median_lebesgue > cell("bspline3", k, 1000).median_lebesgue);
        const double ratio = cell("wavelet1", k, 4000).median_dev / cell("wavelet1", k, 1000).median_dev;
        CHECK(ratio == doctest::Approx(0.5).epsilon(0.2));
    }
}

TEST_CASE("coverage study with zero noise is reported without failing") {
    // Residuals are then pure approximation bias; only h0 in the span would make them vanish.
    CoverageStudyConfig c;
    c.study.n_grid = {300};
    c.study.reps = 5;
    c.dgp.sigma = 0.0;
    c.basis = wavelet(1, 3);
    c.functionals = {FunctionalSpec::point({0.37})};
    const auto quiet = coverage_study(c);
    c.dgp.sigma = 1.0;
    const auto noisy = coverage_study(c);
    REQUIRE(quiet.summaries.size() == 1);
    CHECK(quiet.summaries[0].valid + quiet.summaries[0].degenerate == 5);
    CHECK(quiet.summaries[0].mean_length < noisy.summaries[0].mean_length);
}

TEST_CASE("coverage study rows are consistent") {
    CoverageStudyConfig c;
    c.study.n_grid = {400};
    c.study.reps = 40;
    c.study.seed = 2;
    c.basis = wavelet(1, 4);
    c.functionals = {FunctionalSpec::point({0.37}), FunctionalSpec::exp_point({0.37})};
    const auto r = coverage_study(c);
    CHECK(r.k == 16);
    CHECK(r.rows.size() == 80);
    for (const auto& row : r.rows) {
        CHECK(row.lo <= row.fhat);
        CHECK(row.hi >= row.fhat);
    }
    for (const auto& s : r.summaries) {
        CHECK(s.valid == 40);
        CHECK(s.coverage > 0.7);
    }
}

TEST_CASE("concentration study on a small Haar generator") {
    ConcentrationStudyConfig c;
    c.study.n_grid = {200};
    c.study.reps = 500;
    c.basis = wavelet(1, 2);
    const auto r = concentration_study(c);
    CHECK_FALSE(r.mixing);
    CHECK(r.rows.size() == 20);
    CHECK(r.violations == 0);
    CHECK(r.rows.front().t == 0.0);
    c.rho = 0.7;
    c.q = 10;
    const auto m = concentration_study(c);
    CHECK(m.mixing);
    CHECK(m.beta_q == doctest::Approx(4.0 * std::pow(0.7, 10)));
    CHECK(m.rows[3].threshold == doctest::Approx(6.0 * m.rows[3].t));
    c.q = 7;
    CHECK_THROWS_AS(concentration_study(c), ConfigError);
}
