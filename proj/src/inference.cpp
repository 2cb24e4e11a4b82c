#include "sieve/inference.hpp"

#include "sieve/error.hpp"
#include "sieve/linalg.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>

namespace sieve {

namespace {

constexpr double kExpClamp = 50.0;

void check_point(const FunctionalSpec& spec, const BasisSystem& basis) {
    if (static_cast<int>(spec.x0.size()) != basis.dim()) throw ConfigError("functional x0 has the wrong dimension");
}

Eigen::VectorXd integral_derivative(const FunctionalSpec& spec, const BasisSystem& basis, const QuadratureRule* rule) {
    if (!spec.weight) throw ConfigError("integral functional needs a weight");
    const QuadratureRule own = rule ? QuadratureRule{} : error_quadrature(basis);
    const QuadratureRule& r = rule ? *rule : own;
    Eigen::VectorXd d = Eigen::VectorXd::Zero(basis.size());
    SparseVector b;
    for (Eigen::Index q = 0; q < r.size(); ++q) {
        const auto x = row_span(r.nodes, q);
        const double w = r.weights[q] * spec.weight(x);
        if (w == 0.0) continue;
        basis.evaluate_sparse(x, b);
        for (std::size_t j = 0; j < b.size(); ++j) d[b.index[j]] += w * b.value[j];
    }
    return d;
}

}  // namespace

FunctionalSpec FunctionalSpec::point(std::vector<double> x0) { return {Kind::PointEval, std::move(x0), {}}; }
FunctionalSpec FunctionalSpec::integral(Function weight) { return {Kind::Integral, {}, std::move(weight)}; }
FunctionalSpec FunctionalSpec::exp_point(std::vector<double> x0) { return {Kind::NonlinearExpEval, std::move(x0), {}}; }

std::string FunctionalSpec::name() const { return to_string(kind); }

std::string to_string(FunctionalSpec::Kind kind) {
    switch (kind) {
        case FunctionalSpec::Kind::PointEval: return "point";
        case FunctionalSpec::Kind::Integral: return "integral";
        case FunctionalSpec::Kind::NonlinearExpEval: return "exp_point";
    }
    return "point";
}

FunctionalSpec::Kind functional_kind_from_string(const std::string& name) {
    if (name == "point") return FunctionalSpec::Kind::PointEval;
    if (name == "integral") return FunctionalSpec::Kind::Integral;
    if (name == "exp_point") return FunctionalSpec::Kind::NonlinearExpEval;
    throw ConfigError("unknown functional kind '" + name + "' (expected point, integral or exp_point)");
}

FunctionalValue evaluate_functional(const FunctionalSpec& spec, const BasisSystem& basis,
                                    const Eigen::VectorXd& coeffs, const QuadratureRule* rule) {
    FunctionalValue out;
    switch (spec.kind) {
        case FunctionalSpec::Kind::PointEval:
            check_point(spec, basis);
            out.derivative = basis.evaluate(spec.x0);
            out.value = out.derivative.dot(coeffs);
            break;
        case FunctionalSpec::Kind::Integral:
            out.derivative = integral_derivative(spec, basis, rule);
            out.value = out.derivative.dot(coeffs);
            break;
        case FunctionalSpec::Kind::NonlinearExpEval: {
            const Eigen::VectorXd c = coeffs;
            return nonlinear_functional_eval(spec, basis, [&basis, c](std::span<const double> x) {
                return basis.evaluate(x).dot(c);
            });
        }
    }
    return out;
}

FunctionalValue nonlinear_functional_eval(const FunctionalSpec& spec, const BasisSystem& basis, const Function& h) {
    check_point(spec, basis);
    double hx = h(spec.x0);
    FunctionalValue out;
    if (std::abs(hx) > kExpClamp) {
        hx = std::copysign(kExpClamp, hx);
        out.clamped = true;
    }
    out.value = std::exp(hx);
    out.derivative = out.value * basis.evaluate(spec.x0);
    return out;
}

double functional_truth(const FunctionalSpec& spec, const BasisSystem& basis, const Function& h0) {
    switch (spec.kind) {
        case FunctionalSpec::Kind::PointEval: return h0(spec.x0);
        case FunctionalSpec::Kind::NonlinearExpEval: return std::exp(h0(spec.x0));
        case FunctionalSpec::Kind::Integral: {
            if (!spec.weight) throw ConfigError("integral functional needs a weight");
            const QuadratureRule rule = error_quadrature(basis);
            return integrate(rule, Density::uniform(basis.dim()),
                             [&](std::span<const double> x) { return h0(x) * spec.weight(x); });
        }
    }
    return 0.0;
}

RieszRepresenter riesz_representer(const Eigen::MatrixXd& gram, const Eigen::VectorXd& deriv) {
    int rank = 0;
    const Eigen::MatrixXd inverse = pseudo_inverse_psd(gram, &rank);
    RieszRepresenter out;
    out.coeffs = inverse * deriv;
    out.norm2 = std::max(0.0, deriv.dot(out.coeffs));
    out.rank_deficient = rank < gram.rows();
    return out;
}

double plugin_variance(const SeriesRegression& regression, const FitResult& fit, const Eigen::VectorXd& deriv) {
    // Residuals at round-off level relative to the fit mean the data were noiseless.
    const double scale = std::max(1.0, fit.fitted.size() > 0 ? fit.fitted.cwiseAbs().maxCoeff() : 0.0);
    if (fit.residuals.cwiseAbs().maxCoeff() <= 1e-10 * scale) {
        throw NumericError("degenerate variance: all residuals are zero");
    }
    const Eigen::VectorXd v = regression.design() * (regression.scaled_gram_pinv() * deriv);
    const double vk = (v.array().square() * fit.residuals.array().square()).mean();
    if (!(vk > 0.0)) throw NumericError("degenerate variance: plug-in V_K is not positive");
    return vk;
}

double oracle_variance(const BasisSystem& basis, const Eigen::VectorXd& deriv, const Density& density,
                       const Function& sigma2) {
    const QuadratureRule rule = basis_quadrature(basis);
    Eigen::VectorXd g_weights(rule.size());
    Eigen::VectorXd o_weights(rule.size());
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        const auto x = row_span(rule.nodes, q);
        g_weights[q] = rule.weights[q] * density(x);
        o_weights[q] = g_weights[q] * sigma2(x);
    }
    const SparseRows rows = basis.sparse_design(rule.nodes);
    const int k = basis.size();
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        for (std::size_t a = rows.offset[i]; a < rows.offset[i + 1]; ++a) {
            for (std::size_t b = rows.offset[i]; b < rows.offset[i + 1]; ++b) {
                const double p = rows.value[a] * rows.value[b];
                g(rows.index[a], rows.index[b]) += g_weights[i] * p;
                omega(rows.index[a], rows.index[b]) += o_weights[i] * p;
            }
        }
    }
    const Eigen::VectorXd c = pseudo_inverse_psd(g) * deriv;
    return c.dot(omega * c);
}

Eigen::MatrixXd omega_hat(const SeriesRegression& regression, const FitResult& fit, const Eigen::MatrixXd& gram) {
    const Eigen::MatrixXd bt = regression.design() * inverse_sqrt(gram);
    return bt.transpose() * fit.residuals.array().square().matrix().asDiagonal() * bt /
           static_cast<double>(regression.n());
}

double t_statistic(double fhat, double f0, double vk_hat, Eigen::Index n) {
    if (!(vk_hat > 0.0)) throw NumericError("degenerate variance");
    return std::sqrt(static_cast<double>(n)) * (fhat - f0) / std::sqrt(vk_hat);
}

std::pair<double, double> confidence_interval(double fhat, double vk_hat, Eigen::Index n, double level) {
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must lie in (0, 1)");
    if (!(vk_hat > 0.0)) throw NumericError("degenerate variance");
    const double z = boost::math::quantile(boost::math::normal(), 0.5 + level / 2.0);
    const double half = z * std::sqrt(vk_hat / static_cast<double>(n));
    return {fhat - half, fhat + half};
}

FunctionalReport analyze_functional(const SeriesRegression& regression, const FitResult& fit,
                                    const FunctionalSpec& spec, double level, std::optional<double> truth) {
    const FunctionalValue f = evaluate_functional(spec, regression.basis(), fit.coeffs);
    FunctionalReport r;
    r.fhat = f.value;
    r.deriv = f.derivative;
    r.clamped = f.clamped;
    r.level = level;
    r.n = regression.n();
    r.rank_deficient = fit.rank_deficient;
    const Eigen::MatrixXd scaled = regression.scaled_gram_pinv();
    r.riesz_coeffs = scaled * r.deriv;
    r.vk_hat = plugin_variance(regression, fit, r.deriv);
    std::tie(r.lo, r.hi) = confidence_interval(r.fhat, r.vk_hat, r.n, level);
    if (truth) r.tstat = t_statistic(r.fhat, *truth, r.vk_hat, r.n);
    return r;
}

}  // namespace sieve
