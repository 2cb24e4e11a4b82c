#pragma once

#include "sieve/basis.hpp"
#include "sieve/density.hpp"
#include "sieve/quadrature.hpp"

#include <Eigen/Dense>

namespace sieve {

/// Theoretical and empirical second-moment structure of a sieve.
struct GramSummary {
    Eigen::MatrixXd theoretical;   ///< G = E[b_w b_w']
    Eigen::MatrixXd empirical;     ///< B_w'B_w / n
    double deviation = 0.0;        ///< || G^{-1/2} (B'B/n) G^{-1/2} - I ||_2
    double zeta = 0.0;             ///< sup_x ||b_w(x)|| over the evaluation grid
    double lambda = 0.0;           ///< lambda_min(G)^{-1/2}
    int bandwidth = 0;             ///< half-bandwidth of G
    Eigen::Index n = 0;
};

/// sum_q w_q b(x_q) b(x_q)' from precomputed rows.
Eigen::MatrixXd weighted_gram(const SparseRows& rows, const Eigen::VectorXd& weights, int size);

/// E[b_w b_w'] under a closed-form density, by panel-aligned Gauss-Legendre quadrature.
Eigen::MatrixXd theoretical_gram(const BasisSystem& basis, const Density& density);
Eigen::MatrixXd theoretical_gram(const BasisSystem& basis, const Density& density, const QuadratureRule& rule);

/// n^{-1} sum_i b_w(X_i) b_w(X_i)'.
Eigen::MatrixXd empirical_gram_matrix(const BasisSystem& basis, const PointSet& sample);

/// Spectral norm of the whitened deviation G^{-1/2} G_emp G^{-1/2} - I.
/// Throws NumericError("theoretical Gram not invertible").
double gram_deviation(const Eigen::MatrixXd& empirical, const Eigen::MatrixXd& theoretical);

GramSummary empirical_gram(const BasisSystem& basis, const PointSet& sample, const Eigen::MatrixXd& theoretical);
GramSummary summarize_gram(const BasisSystem& basis, const PointSet& sample, const Density& density);

/// sup over b in the sieve with E[b^2] = 1 of |n^{-1} sum b(X_i)^2 - 1|, which
/// equals the (unsquared) whitened Gram deviation.
double identifiability_gap(const BasisSystem& basis, const PointSet& sample, const Density& density);

/// sup_x ||b_w(x)|| on the evaluation grid.
double zeta_constant(const BasisSystem& basis);
/// lambda_min(G)^{-1/2}; +inf when G is singular.
double lambda_constant(const Eigen::MatrixXd& theoretical);

struct LebesgueResult {
    double value = 0.0;
    Eigen::VectorXd argmax;   ///< grid point attaining the supremum
    int rank = 0;
    bool rank_deficient = false;
};

/// sup_x integral |b(x)' G^{-1} b(y)| f_X(y) dy over the evaluation grid.
LebesgueResult lebesgue_constant_theoretical(const BasisSystem& basis, const Density& density);

/// sup_x sum_i |b_w(x)' (B_w'B_w)^- b_w(X_i)| over the evaluation grid. Rank
/// deficiency is flagged rather than fatal (Moore-Penrose inverse).
LebesgueResult lebesgue_constant_empirical(const BasisSystem& basis, const PointSet& sample);

/// Exponential-decay bound for inverses of banded SPD matrices
/// (A_ij = 0 for |i - j| > band/2, band even):
///   |A^{-1}_ij| <= C lambda^{|i-j|},  ||A^{-1}||_inf <= 2C / (1 - lambda).
struct DmsBound {
    double kappa = 1.0;
    double lambda_decay = 0.0;
    double C = 0.0;
    double bound = 0.0;
};

/// Throws NumericError for non-PD or asymmetric input and ConfigError when the
/// band is odd, < 2, or violated by A.
DmsBound dms_bound(const Eigen::MatrixXd& a, int band);

}  // namespace sieve
