#pragma once

#include "sieve/basis.hpp"
#include "sieve/density.hpp"
#include "sieve/quadrature.hpp"

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <span>

namespace sieve {

/// Scalar function on [0,1]^d.
using Function = std::function<double(std::span<const double>)>;

/// Series least-squares fit h(x) = b_w(x)' (B_w'B_w)^- B_w'Y.
struct FitResult {
    BasisSystem basis;
    Eigen::VectorXd coeffs;
    Eigen::VectorXd fitted;      ///< h(X_i)
    Eigen::VectorXd residuals;   ///< Y_i - h(X_i)
    int rank = 0;
    bool rank_deficient = false;
    double deviation = std::numeric_limits<double>::quiet_NaN();  ///< Gram deviation when a density was supplied

    [[nodiscard]] double operator()(std::span<const double> x) const { return basis.evaluate(x).dot(coeffs); }
    [[nodiscard]] double operator()(double x) const { return (*this)(std::span<const double>(&x, 1)); }
    [[nodiscard]] Eigen::VectorXd evaluate(const PointSet& points) const;
    [[nodiscard]] Function as_function() const;
};

/// Factorization of the weighted design B_w, reusable across response vectors.
/// Uses a complete orthogonal decomposition, so rank-deficient designs get the
/// minimum-norm (Moore-Penrose) solution.
class SeriesRegression {
public:
    SeriesRegression(BasisSystem basis, PointSet sample);

    [[nodiscard]] FitResult fit(const Eigen::VectorXd& y) const;

    [[nodiscard]] const BasisSystem& basis() const { return basis_; }
    [[nodiscard]] const PointSet& sample() const { return sample_; }
    [[nodiscard]] const Eigen::MatrixXd& design() const { return design_; }
    [[nodiscard]] Eigen::Index n() const { return sample_.rows(); }
    [[nodiscard]] int rank() const { return static_cast<int>(qr_.rank()); }
    /// (B_w'B_w / n)^-
    [[nodiscard]] Eigen::MatrixXd scaled_gram_pinv() const;

private:
    BasisSystem basis_;
    PointSet sample_;
    Eigen::MatrixXd design_;
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> qr_;
};

FitResult fit(const BasisSystem& basis, const PointSet& sample, const Eigen::VectorXd& y,
              const Density* density = nullptr);

/// Empirical projection of a known h0 onto the sieve (the fit of noiseless responses).
struct OracleProjection {
    FitResult fit;
    Function truth;
};

OracleProjection project_oracle(const BasisSystem& basis, const PointSet& sample, Function h0);

/// max over grid points of |f - g|.
double sup_error(const Function& f, const Function& g, const PointSet& grid);
/// sqrt( integral (f - g)^2 f_X ) with the given rule.
double l2_error(const Function& f, const Function& g, const Density& density, const QuadratureRule& rule);

/// Evaluation grid restricted to the trimming region D_n.
PointSet weighted_grid(const BasisSystem& basis);
/// Quadrature used for L2 errors: basis-aligned panels refined to >= 1024 per axis (d = 1).
QuadratureRule error_quadrature(const BasisSystem& basis);

/// Sample values h(X_i).
Eigen::VectorXd evaluate_function(const Function& h, const PointSet& points);

}  // namespace sieve
