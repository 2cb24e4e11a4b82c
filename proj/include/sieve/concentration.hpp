#pragma once

#include "sieve/basis.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <vector>

namespace sieve {

/// Parameters of the matrix Bernstein bounds for sums of d1 x d2 random matrices.
struct TailBoundInput {
    int d1 = 1;
    int d2 = 1;
    Eigen::Index n = 1;
    double R = 0.0;        ///< almost-sure bound on ||Xi_i||
    double sigma2 = 0.0;   ///< independent case: max{||sum E Xi Xi'||, ||sum E Xi' Xi||}
    double s2 = 0.0;       ///< mixing case: max over i, j of ||E Xi_i Xi_j'||, ||E Xi_i' Xi_j||
    Eigen::Index q = 1;    ///< block length
    double beta_q = 0.0;   ///< beta-mixing coefficient at lag q
    double t = 0.0;
};

/// (d1 + d2) exp(-(t^2/2) / (sigma2 + R t / 3)).
double tropp_bound(const TailBoundInput& in);

/// (n/q) beta(q) + remainder_tail + 2 (d1 + d2) exp(-(t^2/2) / (n q s2 + q R t / 3)).
/// This bounds P(||sum Xi_i|| >= 6t). Throws ConfigError unless 1 <= q <= n/2.
double mixing_bound(const TailBoundInput& in, double remainder_tail = 0.0);

/// Source of mean-zero random matrices Xi_1..Xi_n; one call draws the whole
/// sequence for a replication and returns sum_i Xi_i.
using MatrixSumGenerator = std::function<Eigen::MatrixXd(std::uint64_t seed)>;

struct TailEstimate {
    std::vector<double> t;
    std::vector<double> frequency;
    std::vector<double> se;   ///< binomial standard error sqrt(p (1 - p) / reps)
    int reps = 0;
};

/// Monte Carlo frequency of ||sum Xi_i||_2 >= scale * t for each t on the grid.
/// Replication r uses seed derive_seed(seed, r); results do not depend on `threads`.
TailEstimate empirical_tail(const MatrixSumGenerator& generator, const std::vector<double>& t_grid, int reps,
                            std::uint64_t seed, int threads = 1, double scale = 1.0);

/// Spectral norm of an arbitrary (possibly rectangular) matrix.
double spectral_norm(const Eigen::MatrixXd& a);

/// Whitened Gram-deviation generator Xi_i = n^{-1} (b~(X_i) b~(X_i)' - I) with
/// b~ = G^{-1/2} b under uniform marginals, and its certified constants.
struct GramDeviationGenerator {
    BasisSystem basis;
    Eigen::MatrixXd whitening;   ///< G^{-1/2}
    Eigen::Index n = 0;
    double rho = 0.0;            ///< AR-copula correlation (0 gives i.i.d. uniform)
    double R = 0.0;              ///< n^{-1} max(sup ||b~||^2 - 1, 1)
    double sigma2 = 0.0;         ///< n^{-1} || E[||b~||^2 b~ b~'] - I ||
    double s2 = 0.0;             ///< sigma2 / n (stationary sequence)

    [[nodiscard]] Eigen::MatrixXd operator()(std::uint64_t seed) const;
    [[nodiscard]] MatrixSumGenerator as_generator() const;
    [[nodiscard]] TailBoundInput bound_input(double t, Eigen::Index q = 1, double beta_q = 0.0) const;
};

GramDeviationGenerator make_gram_deviation_generator(const BasisSystem& basis, Eigen::Index n, double rho);

/// beta(q) envelope c |rho|^q for the Gaussian AR(1) copula.
double ar_beta_envelope(double rho, Eigen::Index q, double c = 4.0);

}  // namespace sieve
