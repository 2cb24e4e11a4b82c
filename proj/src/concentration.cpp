#include "sieve/concentration.hpp"

#include "sieve/dgp.hpp"
#include "sieve/error.hpp"
#include "sieve/gram.hpp"
#include "sieve/linalg.hpp"
#include "sieve/parallel.hpp"
#include "sieve/quadrature.hpp"

#include <cmath>

namespace sieve {

double tropp_bound(const TailBoundInput& in) {
    if (in.t <= 0.0) return in.d1 + in.d2;
    const double denom = in.sigma2 + in.R * in.t / 3.0;
    if (!(denom > 0.0)) return 0.0;
    return (in.d1 + in.d2) * std::exp(-0.5 * in.t * in.t / denom);
}

double mixing_bound(const TailBoundInput& in, double remainder_tail) {
    if (in.q < 1 || 2 * in.q > in.n) throw ConfigError("block length q must satisfy 1 <= q <= n/2");
    if (!(remainder_tail >= 0.0 && remainder_tail <= 1.0)) throw ConfigError("remainder_tail must lie in [0, 1]");
    const double q = static_cast<double>(in.q);
    const double blocks = static_cast<double>(in.n) / q * in.beta_q;
    const double denom = static_cast<double>(in.n) * q * in.s2 + q * in.R * in.t / 3.0;
    double exponential = 2.0 * (in.d1 + in.d2);
    if (in.t > 0.0) exponential = denom > 0.0 ? exponential * std::exp(-0.5 * in.t * in.t / denom) : 0.0;
    return blocks + remainder_tail + exponential;
}

double spectral_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == a.cols() && a.isApprox(a.transpose(), 0.0)) return spectral_norm_symmetric(a);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
    return svd.singularValues()[0];
}

TailEstimate empirical_tail(const MatrixSumGenerator& generator, const std::vector<double>& t_grid, int reps,
                            std::uint64_t seed, int threads, double scale) {
    if (reps < 1) throw ConfigError("reps must be >= 1");
    std::vector<double> norms(static_cast<std::size_t>(reps));
    parallel_for(reps, threads, [&](int r) {
        norms[static_cast<std::size_t>(r)] = spectral_norm(generator(derive_seed(seed, static_cast<std::uint64_t>(r))));
    });
    TailEstimate out;
    out.t = t_grid;
    out.reps = reps;
    for (double t : t_grid) {
        int hits = 0;
        for (double v : norms) hits += v >= scale * t ? 1 : 0;
        const double p = static_cast<double>(hits) / reps;
        out.frequency.push_back(p);
        out.se.push_back(std::sqrt(p * (1.0 - p) / reps));
    }
    return out;
}

Eigen::MatrixXd GramDeviationGenerator::operator()(std::uint64_t seed) const {
    const PointSet x =
        gen_regressors(rho == 0.0 ? RegressorKind::IidUniform : RegressorKind::ArCopula, rho, basis.dim(), n, seed);
    const Eigen::MatrixXd g = empirical_gram_matrix(basis, x);
    Eigen::MatrixXd sum = whitening * g * whitening;
    sum.diagonal().array() -= 1.0;
    return 0.5 * (sum + sum.transpose());
}

MatrixSumGenerator GramDeviationGenerator::as_generator() const {
    return [self = *this](std::uint64_t seed) { return self(seed); };
}

TailBoundInput GramDeviationGenerator::bound_input(double t, Eigen::Index q, double beta_q) const {
    TailBoundInput in;
    in.d1 = in.d2 = basis.size();
    in.n = n;
    in.R = R;
    in.sigma2 = sigma2;
    in.s2 = s2;
    in.q = q;
    in.beta_q = beta_q;
    in.t = t;
    return in;
}

GramDeviationGenerator make_gram_deviation_generator(const BasisSystem& basis, Eigen::Index n, double rho) {
    if (n < 2) throw ConfigError("generator needs n >= 2");
    const Density uniform = Density::uniform(basis.dim());
    const QuadratureRule rule = basis_quadrature(basis);
    const Eigen::MatrixXd g = theoretical_gram(basis, uniform, rule);
    GramDeviationGenerator gen{basis, inverse_sqrt(g), n, rho};
    const Eigen::MatrixXd ginv = gen.whitening * gen.whitening;

    double sup_norm2 = 0.0;
    const PointSet grid = evaluation_grid(basis);
    for (Eigen::Index i = 0; i < grid.rows(); ++i) {
        const Eigen::VectorXd b = basis.evaluate(row_span(grid, i));
        sup_norm2 = std::max(sup_norm2, b.dot(ginv * b));
    }
    const double nn = static_cast<double>(n);
    gen.R = std::max(sup_norm2 - 1.0, 1.0) / nn;

    // E[(b~ b~' - I)^2] = E[||b~||^2 b~ b~'] - I under the true law.
    const int k = basis.size();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        const Eigen::VectorXd bt = gen.whitening * basis.evaluate(row_span(rule.nodes, q));
        m.noalias() += rule.weights[q] * bt.squaredNorm() * (bt * bt.transpose());
    }
    m.diagonal().array() -= 1.0;
    gen.sigma2 = spectral_norm_symmetric(0.5 * (m + m.transpose())) / nn;
    gen.s2 = gen.sigma2 / nn;
    return gen;
}

double ar_beta_envelope(double rho, Eigen::Index q, double c) {
    return c * std::pow(std::abs(rho), static_cast<double>(q));
}

}  // namespace sieve
