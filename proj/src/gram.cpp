#include "sieve/gram.hpp"

#include "sieve/error.hpp"
#include "sieve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sieve {

namespace {

// Lebesgue-constant integrals need finer panels than Gram entries because |.|
// introduces kinks inside panels.
QuadratureRule lebesgue_rule(const BasisSystem& basis) {
    const int dim = basis.dim();
    const int panels = dim == 1 ? 512 : dim == 2 ? 32 : 8;
    return basis_quadrature(basis, panels, std::size_t{1} << 16);
}

LebesgueResult grid_supremum(const BasisSystem& basis, const Eigen::MatrixXd& inverse, const SparseRows& rows,
                             const Eigen::VectorXd& weights) {
    const PointSet grid = evaluation_grid(basis);
    const int k = basis.size();
    LebesgueResult result;
    result.value = -1.0;
    const Eigen::Index n = rows.rows();
    if (static_cast<double>(rows.index.size()) > 0.25 * static_cast<double>(n) * k) {
        // Dense designs (power, trig): blocked matrix products beat the sparse loop.
        const Eigen::MatrixXd kernel = inverse * basis.design_matrix(grid).transpose();   // K x grid
        Eigen::VectorXd totals = Eigen::VectorXd::Zero(grid.rows());
        constexpr Eigen::Index kBlock = 512;
        Eigen::MatrixXd block;
        for (Eigen::Index start = 0; start < n; start += kBlock) {
            const Eigen::Index len = std::min(kBlock, n - start);
            block.setZero(len, k);
            for (Eigen::Index i = 0; i < len; ++i) {
                const auto r = static_cast<std::size_t>(start + i);
                for (std::size_t j = rows.offset[r]; j < rows.offset[r + 1]; ++j) block(i, rows.index[j]) = rows.value[j];
            }
            const Eigen::MatrixXd values = block * kernel;   // len x grid
            totals.noalias() += (values.cwiseAbs().transpose() * weights.segment(start, len));
        }
        Eigen::Index best = 0;
        result.value = totals.maxCoeff(&best);
        result.argmax = grid.row(best).transpose();
        return result;
    }
    SparseVector bx;
    Eigen::VectorXd c(k);
    for (Eigen::Index g = 0; g < grid.rows(); ++g) {
        basis.evaluate_sparse(row_span(grid, g), bx);
        c.setZero();
        for (std::size_t j = 0; j < bx.size(); ++j) c += bx.value[j] * inverse.col(bx.index[j]);
        double total = 0.0;
        for (Eigen::Index i = 0; i < rows.rows(); ++i) total += weights[i] * std::abs(rows.dot(i, c));
        if (total > result.value) {
            result.value = total;
            result.argmax = grid.row(g).transpose();
        }
    }
    return result;
}

}  // namespace

Eigen::MatrixXd weighted_gram(const SparseRows& rows, const Eigen::VectorXd& weights, int size) {
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(size, size);
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        const std::size_t begin = rows.offset[static_cast<std::size_t>(i)];
        const std::size_t end = rows.offset[static_cast<std::size_t>(i) + 1];
        const double w = weights[i];
        for (std::size_t a = begin; a < end; ++a) {
            const double wa = w * rows.value[a];
            for (std::size_t b = begin; b < end; ++b) g(rows.index[a], rows.index[b]) += wa * rows.value[b];
        }
    }
    return g;
}

Eigen::MatrixXd theoretical_gram(const BasisSystem& basis, const Density& density, const QuadratureRule& rule) {
    Eigen::VectorXd weights(rule.size());
    for (Eigen::Index q = 0; q < rule.size(); ++q) weights[q] = rule.weights[q] * density(row_span(rule.nodes, q));
    return weighted_gram(basis.sparse_design(rule.nodes), weights, basis.size());
}

Eigen::MatrixXd theoretical_gram(const BasisSystem& basis, const Density& density) {
    return theoretical_gram(basis, density, basis_quadrature(basis));
}

Eigen::MatrixXd empirical_gram_matrix(const BasisSystem& basis, const PointSet& sample) {
    if (sample.rows() < 1) throw ConfigError("empirical Gram needs n >= 1");
    const Eigen::VectorXd weights = Eigen::VectorXd::Constant(sample.rows(), 1.0 / static_cast<double>(sample.rows()));
    return weighted_gram(basis.sparse_design(sample), weights, basis.size());
}

double gram_deviation(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& theoretical) {
    const Eigen::MatrixXd w = inverse_sqrt(theoretical);
    Eigen::MatrixXd m = w * empirical * w;
    m.diagonal().array() -= 1.0;
    return spectral_norm_symmetric(0.5 * (m + m.transpose()));
}

GramSummary empirical_gram(const BasisSystem& basis, const PointSet& sample, const Eigen::MatrixXd& theoretical) {
    GramSummary s;
    s.theoretical = theoretical;
    s.empirical = empirical_gram_matrix(basis, sample);
    s.deviation = gram_deviation(s.empirical, theoretical);
    s.zeta = zeta_constant(basis);
    s.lambda = lambda_constant(theoretical);
    s.bandwidth = half_bandwidth(theoretical);
    s.n = sample.rows();
    return s;
}

GramSummary summarize_gram(const BasisSystem& basis, const PointSet& sample, const Density& density) {
    return empirical_gram(basis, sample, theoretical_gram(basis, density));
}

double identifiability_gap(const BasisSystem& basis, const PointSet& sample, const Density& density) {
    return gram_deviation(empirical_gram_matrix(basis, sample), theoretical_gram(basis, density));
}

double zeta_constant(const BasisSystem& basis) {
    const PointSet grid = evaluation_grid(basis);
    double best = 0.0;
    SparseVector b;
    for (Eigen::Index g = 0; g < grid.rows(); ++g) {
        basis.evaluate_sparse(row_span(grid, g), b);
        double s = 0.0;
        for (double v : b.value) s += v * v;
        best = std::max(best, std::sqrt(s));
    }
    return best;
}

double lambda_constant(const Eigen::MatrixXd& theoretical) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(theoretical, Eigen::EigenvaluesOnly);
    const double low = eig.eigenvalues().minCoeff();
    return low > 0.0 ? 1.0 / std::sqrt(low) : std::numeric_limits<double>::infinity();
}

LebesgueResult lebesgue_constant_theoretical(const BasisSystem& basis, const Density& density) {
    const Eigen::MatrixXd g = theoretical_gram(basis, density);
    int rank = 0;
    const Eigen::MatrixXd inverse = pseudo_inverse_psd(g, &rank);
    if (rank < basis.size()) throw NumericError("theoretical Gram not invertible");
    const QuadratureRule rule = lebesgue_rule(basis);
    Eigen::VectorXd weights(rule.size());
    for (Eigen::Index q = 0; q < rule.size(); ++q) weights[q] = rule.weights[q] * density(row_span(rule.nodes, q));
    auto result = grid_supremum(basis, inverse, basis.sparse_design(rule.nodes), weights);
    result.rank = rank;
    return result;
}

LebesgueResult lebesgue_constant_empirical(const BasisSystem& basis, const PointSet& sample) {
    const SparseRows rows = basis.sparse_design(sample);
    const Eigen::MatrixXd btb = weighted_gram(rows, Eigen::VectorXd::Ones(sample.rows()), basis.size());
    int rank = 0;
    const Eigen::MatrixXd inverse = pseudo_inverse_psd(btb, &rank);
    auto result = grid_supremum(basis, inverse, rows, Eigen::VectorXd::Ones(sample.rows()));
    result.rank = rank;
    result.rank_deficient = rank < basis.size();
    return result;
}

DmsBound dms_bound(const Eigen::MatrixXd& a, int band) {
    if (a.rows() != a.cols() || a.rows() == 0) throw ConfigError("dms_bound needs a nonempty square matrix");
    if (band < 2 || band % 2 != 0) throw ConfigError("band m must be even and >= 2");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) throw NumericError("matrix is not symmetric");
    if (half_bandwidth(a) > band / 2) {
        throw ConfigError("band violation: nonzero entry beyond |i-j| = " + std::to_string(band / 2));
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const double low = eig.eigenvalues().minCoeff();
    const double high = eig.eigenvalues().maxCoeff();
    if (!(low > 0.0)) throw NumericError("matrix is not positive definite");
    DmsBound out;
    out.kappa = high / low;
    const double root = std::sqrt(out.kappa);
    out.lambda_decay = std::pow((root - 1.0) / (root + 1.0), 2.0 / band);
    out.C = (1.0 / low) * std::max(1.0, (1.0 + root) * (1.0 + root) / (2.0 * out.kappa));
    out.bound = 2.0 * out.C / (1.0 - out.lambda_decay);
    return out;
}

}  // namespace sieve
