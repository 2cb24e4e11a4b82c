#pragma once

#include <Eigen/Dense>

namespace sieve {

/// Largest absolute eigenvalue of a symmetric matrix (its spectral norm).
double spectral_norm_symmetric(const Eigen::MatrixXd& a);

/// Symmetric inverse square root G^{-1/2}. Throws NumericError when G is not
/// positive definite (smallest eigenvalue <= 1e-12 * largest).
Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& g, const char* what = "theoretical Gram not invertible");

/// Moore-Penrose inverse of a symmetric PSD matrix; eigenvalues below
/// K * eps * lambda_max are treated as zero. `rank` receives the numerical rank.
Eigen::MatrixXd pseudo_inverse_psd(const Eigen::MatrixXd& a, int* rank = nullptr);

/// Maximum absolute row sum.
double linf_norm(const Eigen::MatrixXd& a);

/// Largest |i - j| with a(i, j) != 0.
int half_bandwidth(const Eigen::MatrixXd& a);

}  // namespace sieve
