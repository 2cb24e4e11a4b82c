#include "sieve/estimator.hpp"

#include "sieve/error.hpp"
#include "sieve/gram.hpp"
#include "sieve/linalg.hpp"

#include <cmath>
#include <limits>

namespace sieve {

Eigen::VectorXd FitResult::evaluate(const PointSet& points) const {
    Eigen::VectorXd out(points.rows());
    SparseVector b;
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        basis.evaluate_sparse(row_span(points, i), b);
        out[i] = b.dot(coeffs);
    }
    return out;
}

Function FitResult::as_function() const {
    return [basis = basis, coeffs = coeffs](std::span<const double> x) {
        SparseVector b;
        basis.evaluate_sparse(x, b);
        return b.dot(coeffs);
    };
}

SeriesRegression::SeriesRegression(BasisSystem basis, PointSet sample)
    : basis_(std::move(basis)), sample_(std::move(sample)) {
    if (sample_.rows() < 1) throw ConfigError("fit needs n >= 1");
    design_ = basis_.design_matrix(sample_);
    qr_.setThreshold(static_cast<double>(basis_.size()) * std::numeric_limits<double>::epsilon());
    qr_.compute(design_);
}

FitResult SeriesRegression::fit(const Eigen::VectorXd& y) const {
    if (y.size() != sample_.rows()) throw ConfigError("response length does not match the sample size");
    FitResult out{basis_, qr_.solve(y), {}, {}, rank(), rank() < basis_.size()};
    out.fitted = design_ * out.coeffs;
    out.residuals = y - out.fitted;
    return out;
}

Eigen::MatrixXd SeriesRegression::scaled_gram_pinv() const {
    const Eigen::MatrixXd g = design_.transpose() * design_ / static_cast<double>(n());
    return pseudo_inverse_psd(g);
}

FitResult fit(const BasisSystem& basis, const PointSet& sample, const Eigen::VectorXd& y, const Density* density) {
    FitResult out = SeriesRegression(basis, sample).fit(y);
    if (density) out.deviation = gram_deviation(empirical_gram_matrix(basis, sample), theoretical_gram(basis, *density));
    return out;
}

Eigen::VectorXd evaluate_function(const Function& h, const PointSet& points) {
    Eigen::VectorXd out(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) out[i] = h(row_span(points, i));
    return out;
}

OracleProjection project_oracle(const BasisSystem& basis, const PointSet& sample, Function h0) {
    const Eigen::VectorXd h = evaluate_function(h0, sample);
    return {SeriesRegression(basis, sample).fit(h), std::move(h0)};
}

double sup_error(const Function& f, const Function& g, const PointSet& grid) {
    double best = 0.0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        const auto x = row_span(grid, i);
        best = std::max(best, std::abs(f(x) - g(x)));
    }
    return best;
}

double l2_error(const Function& f, const Function& g, const Density& density, const QuadratureRule& rule) {
    const double s = integrate(rule, density, [&](std::span<const double> x) {
        const double d = f(x) - g(x);
        return d * d;
    });
    return std::sqrt(std::max(0.0, s));
}

PointSet weighted_grid(const BasisSystem& basis) {
    PointSet grid = evaluation_grid(basis);
    if (!basis.spec().weight) return grid;
    PointSet kept(grid.rows(), grid.cols());
    Eigen::Index m = 0;
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        if (basis.in_weight_region(row_span(grid, i))) kept.row(m++) = grid.row(i);
    }
    kept.conservativeResize(m, grid.cols());
    return kept;
}

QuadratureRule error_quadrature(const BasisSystem& basis) {
    const int dim = basis.dim();
    return basis_quadrature(basis, dim == 1 ? 1024 : dim == 2 ? 64 : 8, std::size_t{1} << 18);
}

}  // namespace sieve
