#pragma once

#include "sieve/basis.hpp"
#include "sieve/concentration.hpp"
#include "sieve/density.hpp"
#include "sieve/dgp.hpp"
#include "sieve/inference.hpp"
#include "sieve/stats.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace sieve {

/// K = round(c (n / log n)^exponent), exponent = d / (2p + d).
struct KRule {
    double constant = 1.0;
    double exponent = 0.2;

    [[nodiscard]] int target(Eigen::Index n) const;
};

/// Adjust the size parameter of `base` so that the univariate size is as close
/// as possible to K^{1/d} while respecting the family's constraints.
BasisSpec basis_for_size(const BasisSpec& base, int k);

/// Options shared by all Monte Carlo studies.
struct StudySettings {
    std::vector<Eigen::Index> n_grid;
    int reps = 0;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    int threads = 1;
};

// ---------------------------------------------------------------- rate study

struct RateStudyConfig {
    StudySettings study;
    DgpSpec dgp;
    BasisSpec basis;
    KRule krule;
    bool synthetic_oracle = false;
    double synthetic_constant = 1.0;
};

struct RateRow {
    Eigen::Index n = 0;
    int rep = 0;
    int k = 0;
    double sup_error = 0.0;
    double l2_error = 0.0;
};

struct RateLevel {
    Eigen::Index n = 0;
    int k = 0;
    double median_sup = 0.0;
    double median_l2 = 0.0;
};

struct RateStudyReport {
    std::vector<RateRow> rows;
    std::vector<RateLevel> levels;
    LineFit sup_fit;   ///< log median sup error on log(n / log n)
    LineFit l2_fit;
};

RateStudyReport rate_study(const RateStudyConfig& config);

// ------------------------------------------------------------ coverage study

struct CoverageStudyConfig {
    StudySettings study;
    DgpSpec dgp;
    BasisSpec basis;
    std::optional<KRule> krule;   ///< fixed basis when absent
    std::vector<FunctionalSpec> functionals;
};

struct CoverageRow {
    int rep = 0;
    std::string functional;
    double fhat = 0.0;
    double vk_hat = 0.0;
    double t = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool covered = false;
    bool degenerate = false;
};

struct CoverageSummary {
    std::string functional;
    double truth = 0.0;
    double coverage = 0.0;
    double mean_length = 0.0;
    int degenerate = 0;
    int valid = 0;
    KsResult ks;
};

struct CoverageStudyReport {
    Eigen::Index n = 0;
    int k = 0;
    std::vector<CoverageRow> rows;
    std::vector<CoverageSummary> summaries;
};

CoverageStudyReport coverage_study(const CoverageStudyConfig& config);

// ----------------------------------------------------------- stability study

struct StabilityStudyConfig {
    StudySettings study;
    std::vector<BasisSpec> bases;   ///< templates; sizes come from k_values
    std::vector<int> k_values;
    std::vector<double> rhos{0.0};  ///< 0 = i.i.d. uniform design, else AR copula
    bool lebesgue = true;
};

struct StabilityRow {
    std::string basis;
    int k = 0;
    Eigen::Index n = 0;
    double rho = 0.0;
    int rep = 0;
    double dev = 0.0;
    double lebesgue = 0.0;   ///< NaN when disabled
    bool rank_deficient = false;
};

struct StabilityCell {
    std::string basis;
    int k = 0;
    Eigen::Index n = 0;
    double rho = 0.0;
    double median_dev = 0.0;
    double median_lebesgue = 0.0;
};

struct StabilityStudyReport {
    std::vector<StabilityRow> rows;
    std::vector<StabilityCell> cells;
    /// Slope of log median dev on log n per (basis, K, rho) with >= 2 sizes.
    std::map<std::string, LineFit> dev_slopes;
};

/// Short label such as "bspline4", "wavelet1", "power".
std::string basis_label(const BasisSpec& spec);
BasisSpec basis_from_label(const std::string& label);

StabilityStudyReport stability_study(const StabilityStudyConfig& config);

// ------------------------------------------------------- concentration study

struct ConcentrationStudyConfig {
    StudySettings study;   ///< n_grid must hold exactly one n
    BasisSpec basis;
    double rho = 0.0;      ///< 0: independent bound, otherwise mixing bound
    Eigen::Index q = 1;
    double beta_constant = 4.0;
    int t_points = 20;
    double tail_floor = 1e-3;   ///< grid ends where the exponential term reaches this level
};

struct ConcentrationRow {
    double t = 0.0;
    double threshold = 0.0;   ///< norm level compared against (t or 6t)
    double bound = 0.0;
    double frequency = 0.0;
    double se = 0.0;
    int reps = 0;
    bool violated = false;
};

struct ConcentrationStudyReport {
    bool mixing = false;
    int k = 0;
    Eigen::Index n = 0;
    double R = 0.0;
    double sigma2 = 0.0;
    double s2 = 0.0;
    double beta_q = 0.0;
    std::vector<ConcentrationRow> rows;
    int violations = 0;
};

ConcentrationStudyReport concentration_study(const ConcentrationStudyConfig& config);

}  // namespace sieve
