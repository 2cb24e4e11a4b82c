#pragma once

#include "sieve/basis.hpp"
#include "sieve/density.hpp"
#include "sieve/estimator.hpp"
#include "sieve/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace sieve {

/// Functional f(h) whose sieve t-statistic is reported.
struct FunctionalSpec {
    enum class Kind { PointEval, Integral, NonlinearExpEval };

    Kind kind = Kind::PointEval;
    std::vector<double> x0;   ///< evaluation point (PointEval, NonlinearExpEval)
    Function weight;          ///< integrand weight (Integral): f(h) = int h(x) weight(x) dx

    static FunctionalSpec point(std::vector<double> x0);
    static FunctionalSpec integral(Function weight);
    static FunctionalSpec exp_point(std::vector<double> x0);

    [[nodiscard]] bool linear() const { return kind != Kind::NonlinearExpEval; }
    [[nodiscard]] std::string name() const;
};

std::string to_string(FunctionalSpec::Kind kind);
FunctionalSpec::Kind functional_kind_from_string(const std::string& name);

/// Value f(h) and the pathwise derivative vector df(h)/dh[b^K_w].
struct FunctionalValue {
    double value = 0.0;
    Eigen::VectorXd derivative;
    bool clamped = false;   ///< NonlinearExpEval with |h(x0)| > 50
};

/// Evaluate f at h = b' coeffs. Integral functionals integrate with `rule`
/// (Lebesgue measure); pass nullptr to use the basis-aligned default rule.
FunctionalValue evaluate_functional(const FunctionalSpec& spec, const BasisSystem& basis,
                                    const Eigen::VectorXd& coeffs, const QuadratureRule* rule = nullptr);

/// exp(h(x0)) and exp(h(x0)) b_w(x0) for an arbitrary evaluator of h.
FunctionalValue nonlinear_functional_eval(const FunctionalSpec& spec, const BasisSystem& basis, const Function& h);

/// f(h0) for a known function, by quadrature for Integral functionals.
double functional_truth(const FunctionalSpec& spec, const BasisSystem& basis, const Function& h0);

struct RieszRepresenter {
    Eigen::VectorXd coeffs;    ///< Gram^{-1} deriv
    double norm2 = 0.0;        ///< deriv' Gram^{-1} deriv
    bool rank_deficient = false;
};

RieszRepresenter riesz_representer(const Eigen::MatrixXd& gram, const Eigen::VectorXd& deriv);

struct FunctionalReport {
    double fhat = 0.0;
    Eigen::VectorXd deriv;
    Eigen::VectorXd riesz_coeffs;
    double vk_hat = 0.0;
    std::optional<double> tstat;
    double lo = 0.0;
    double hi = 0.0;
    double level = 0.95;
    Eigen::Index n = 0;
    bool clamped = false;
    bool rank_deficient = false;
};

/// Plug-in V_K-hat = n^{-1} sum_i v*(X_i)^2 (Y_i - h(X_i))^2 with
/// v*(x) = b_w(x)' (B'B/n)^- deriv. Throws NumericError("degenerate variance")
/// when the residuals are identically zero or the estimate is not positive.
double plugin_variance(const SeriesRegression& regression, const FitResult& fit, const Eigen::VectorXd& deriv);

/// V_K = deriv' G^{-1} Omega G^{-1} deriv, Omega = E[sigma^2(X) b b'], by quadrature.
double oracle_variance(const BasisSystem& basis, const Eigen::VectorXd& deriv, const Density& density,
                       const Function& sigma2);

/// Omega-hat = B~' diag(u^2) B~ / n with B~ = B G^{-1/2}.
Eigen::MatrixXd omega_hat(const SeriesRegression& regression, const FitResult& fit, const Eigen::MatrixXd& gram);

double t_statistic(double fhat, double f0, double vk_hat, Eigen::Index n);
std::pair<double, double> confidence_interval(double fhat, double vk_hat, Eigen::Index n, double level);

/// Full pipeline for one fitted sample: f(h-hat), derivative, representer
/// (with the empirical Gram), plug-in variance, CI, and t against `truth` when given.
FunctionalReport analyze_functional(const SeriesRegression& regression, const FitResult& fit,
                                    const FunctionalSpec& spec, double level,
                                    std::optional<double> truth = std::nullopt);

}  // namespace sieve
