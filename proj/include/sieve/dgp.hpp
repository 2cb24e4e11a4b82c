#pragma once

#include "sieve/basis.hpp"
#include "sieve/estimator.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>

namespace sieve {

enum class RegressorKind { IidUniform, ArCopula };
enum class ErrorKind { Gaussian, StudentT, Heteroskedastic };
enum class Innovation { Gaussian, StudentT };
enum class TestFunction { Smooth, Kink };

std::string to_string(RegressorKind kind);
std::string to_string(ErrorKind kind);
std::string to_string(Innovation kind);
std::string to_string(TestFunction kind);

/// Data-generating process Y_i = h0(X_i) + e_i on [0,1]^d.
///
/// Regressors: each coordinate is Phi(L_i) for a latent stationary Gaussian
/// AR(1) L_i = rho L_{i-1} + sqrt(1 - rho^2) Z_i, so marginals are exactly
/// uniform; rho = 0 gives i.i.d. uniform draws from the same stream.
///
/// Errors: Gaussian(sigma), StudentT(df) * scale, or sigma(x) * eta with
/// sigma(x) = 0.5 + x_1 (1 - x_1) and eta standard normal or unit-variance t(df).
/// Innovations are drawn independently of X and of the past.
///
/// h0: "smooth" is sum_l sin(2 pi x_l) + 0.3 cos(5 x_l); "kink" is
/// sum_l sin(2 pi x_l) + amplitude * s^(floor(p)+1) |x_l - c|^p with
/// s = sign(x_l - c), which has Hoelder smoothness exactly p at x = c.
struct DgpSpec {
    int dim = 1;
    RegressorKind regressor = RegressorKind::IidUniform;
    double rho = 0.0;
    ErrorKind error = ErrorKind::Gaussian;
    double sigma = 1.0;
    double df = 5.0;
    double scale = 1.0;
    Innovation innovation = Innovation::Gaussian;
    TestFunction h0 = TestFunction::Smooth;
    double smoothness = 2.0;        ///< Hoelder p of the kink function
    double kink_location = 0.4142;  ///< c
    double kink_amplitude = 4.0;

    /// Throws ConfigError for rho outside (-1, 1), df <= 2, negative scales, ...
    void validate() const;

    [[nodiscard]] double h0_value(std::span<const double> x) const;
    [[nodiscard]] Function h0_function() const;
    /// E[e^2 | X = x].
    [[nodiscard]] double conditional_variance(std::span<const double> x) const;
    [[nodiscard]] Function variance_function() const;
    /// Declared Hoelder smoothness (infinite for "smooth").
    [[nodiscard]] double declared_smoothness() const;

    [[nodiscard]] std::map<std::string, std::string> to_key_values() const;
    static DgpSpec from_key_values(const std::map<std::string, std::string>& values);
};

struct Sample {
    PointSet x;
    Eigen::VectorXd y;
    Eigen::VectorXd errors;
    Eigen::VectorXd h0;
};

/// Regressors use stream derive_seed(seed, 1) and errors derive_seed(seed, 2),
/// so changing the error law leaves X unchanged.
Sample gen_sample(const DgpSpec& dgp, Eigen::Index n, std::uint64_t seed);
PointSet gen_regressors(const DgpSpec& dgp, Eigen::Index n, std::uint64_t seed);
PointSet gen_regressors(RegressorKind kind, double rho, int dim, Eigen::Index n, std::uint64_t seed);

}  // namespace sieve
