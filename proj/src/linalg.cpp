#include "sieve/linalg.hpp"

#include "sieve/error.hpp"

#include <cmath>
#include <limits>

namespace sieve {

double spectral_norm_symmetric(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().cwiseAbs().maxCoeff();
}

Eigen::MatrixXd inverse_sqrt(const Eigen::MatrixXd& g, const char* what) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double top = values.maxCoeff();
    if (!(top > 0.0) || !(values.minCoeff() > 1e-12 * top)) throw NumericError(what);
    return eig.eigenvectors() * values.cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().transpose();
}

Eigen::MatrixXd pseudo_inverse_psd(const Eigen::MatrixXd& a, int* rank) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::VectorXd& values = eig.eigenvalues();
    const double top = values.cwiseAbs().maxCoeff();
    const double cutoff = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon() * top;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(values.size());
    int r = 0;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (values[i] > cutoff) {
            inv[i] = 1.0 / values[i];
            ++r;
        }
    }
    if (rank) *rank = r;
    return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

double linf_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

int half_bandwidth(const Eigen::MatrixXd& a) {
    int band = 0;
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            if (a(i, j) != 0.0) band = std::max(band, static_cast<int>(std::abs(i - j)));
        }
    }
    return band;
}

}  // namespace sieve
