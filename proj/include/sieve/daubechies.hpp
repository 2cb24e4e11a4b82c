#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace sieve {

/// Daubechies scaling family tabulated on a dyadic grid, plus the boundary
/// functions used to build an orthonormal system on [0,1].
///
/// Coordinates follow the convention that the interior generator phi has
/// support [-N+1, N]. Left boundary functions live on [0, 2N-1] and right
/// boundary functions on [-(2N-1), 0]; both are stored on the same grid
/// spacing 2^-depth. Values between grid points are linearly interpolated.
///
/// Boundary functions are the truncated polynomial reproductions
///   sum_k m_a(k) phi(u - k),  a = 0..N-1,
/// restricted to the half line, then Gram-Schmidt orthonormalized (in order
/// a = 0..N-1) under the exact L2 inner product of the interpolants. They
/// are orthogonal to every interior translate that fits inside the half line
/// and do not depend on the resolution level.
struct ScalingTable {
    int vanishing_moments = 1;
    int depth = 12;
    std::vector<double> interior;             ///< phi on [-N+1, N]
    std::vector<std::vector<double>> left;    ///< N functions on [0, 2N-1]
    std::vector<std::vector<double>> right;   ///< N functions on [-(2N-1), 0]
    int iterations = 0;                       ///< cascade iterations used
    double last_delta = 0.0;                  ///< sup-norm change of the final iterate

    [[nodiscard]] double step() const;
    [[nodiscard]] int support_length() const { return 2 * vanishing_moments - 1; }

    /// phi(u), zero outside (-N+1, N).
    [[nodiscard]] double phi(double u) const;
    [[nodiscard]] double left_value(int k, double u) const;
    [[nodiscard]] double right_value(int k, double v) const;
};

/// Low-pass filter h_k of the Daubechies wavelet with N vanishing moments,
/// normalized so that sum h_k = sqrt(2). N in {1,2,3}.
std::vector<double> daubechies_filter(int vanishing_moments);

/// Moments mu_j = integral of y^j phi(y) dy (support [-N+1, N]) for j = 0..max_power,
/// computed exactly from the two-scale relation.
std::vector<double> scaling_moments(int vanishing_moments, int max_power);

/// Tabulate phi by cascade iteration on the dyadic grid of the given depth and
/// build the boundary functions. Throws NumericError if the cascade has not
/// converged (sup-norm delta > 1e-8) within 60 iterations.
ScalingTable tabulate_daubechies(int vanishing_moments, int depth);

/// Binary cache keyed by (N, depth) with a version header.
void save_scaling_table(const ScalingTable& table, const std::filesystem::path& path);
ScalingTable load_scaling_table(const std::filesystem::path& path, int vanishing_moments, int depth);

/// Exact L2 inner product of two piecewise-linear interpolants on a common grid.
double interpolant_inner_product(std::span<const double> a, std::span<const double> b, double step);

}  // namespace sieve
