#include "sieve/study.hpp"

#include "sieve/error.hpp"
#include "sieve/gram.hpp"
#include "sieve/parallel.hpp"

#include <cmath>
#include <limits>

namespace sieve {

namespace {

void check_settings(const StudySettings& s) {
    if (s.n_grid.empty()) throw ConfigError("n_grid must not be empty");
    for (Eigen::Index n : s.n_grid) {
        if (n < 2) throw ConfigError("every n in n_grid must be >= 2");
    }
    if (s.reps < 1) throw ConfigError("reps must be >= 1");
    if (s.threads < 1) throw ConfigError("threads must be >= 1");
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
}

double log_n_over_log(Eigen::Index n) {
    const double x = static_cast<double>(n);
    return std::log(x / std::log(x));
}

// Dense evaluations of the basis and of h0 at fixed points, reused across replications.
struct Probe {
    Eigen::MatrixXd design;
    Eigen::VectorXd truth;
    Eigen::VectorXd weights;
};

Probe make_probe(const BasisSystem& basis, const PointSet& points, const Function& h0) {
    Probe p;
    p.design = basis.design_matrix(points);
    p.truth.resize(points.rows());
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        const auto x = row_span(points, i);
        p.truth[i] = basis.in_weight_region(x) ? h0(x) : 0.0;
    }
    return p;
}

}  // namespace

int KRule::target(Eigen::Index n) const {
    if (n < 2) throw ConfigError("K rule needs n >= 2");
    if (!(constant > 0.0) || !(exponent > 0.0)) throw ConfigError("K rule constant and exponent must be > 0");
    const double x = static_cast<double>(n);
    return std::max(1, static_cast<int>(std::lround(constant * std::pow(x / std::log(x), exponent))));
}

BasisSpec basis_for_size(const BasisSpec& base, int k) {
    if (k < 1) throw ConfigError("basis size must be >= 1");
    BasisSpec s = base;
    const int k0 = std::max(1, static_cast<int>(std::lround(std::pow(static_cast<double>(k), 1.0 / base.dim))));
    switch (s.family) {
        case Family::BSpline: s.interior_knots = std::max(0, k0 - s.order); break;
        case Family::Power: s.degree = k0 - 1; break;
        case Family::Trig: s.degree = std::max(0, static_cast<int>(std::lround((k0 - 1) / 2.0))); break;
        case Family::Wavelet: {
            s.level = std::max(0, static_cast<int>(std::lround(std::log2(static_cast<double>(k0)))));
            for (;; ++s.level) {
                try {
                    s.validate();
                    break;
                } catch (const ConfigError&) {
                    if (s.level > 20) throw;
                }
            }
            break;
        }
    }
    s.validate();
    return s;
}

// ---------------------------------------------------------------- rate study

RateStudyReport rate_study(const RateStudyConfig& config) {
    check_settings(config.study);
    config.dgp.validate();
    const auto& grid = config.study.n_grid;
    const int reps = config.study.reps;
    const int levels = static_cast<int>(grid.size());
    RateStudyReport report;
    report.rows.resize(static_cast<std::size_t>(levels * reps));

    std::vector<BasisSystem> bases;
    std::vector<Probe> sup_probe, l2_probe;
    const Function h0 = config.dgp.h0_function();
    for (Eigen::Index n : grid) {
        bases.push_back(build_basis(basis_for_size(config.basis, config.krule.target(n))));
        if (config.synthetic_oracle) continue;
        sup_probe.push_back(make_probe(bases.back(), weighted_grid(bases.back()), h0));
        const QuadratureRule rule = error_quadrature(bases.back());
        Probe p = make_probe(bases.back(), rule.nodes, h0);
        const Density density = Density::uniform(config.dgp.dim);
        p.weights.resize(rule.size());
        for (Eigen::Index q = 0; q < rule.size(); ++q) p.weights[q] = rule.weights[q] * density(row_span(rule.nodes, q));
        l2_probe.push_back(std::move(p));
    }

    const double rate = (1.0 - config.krule.exponent) / 2.0;
    parallel_for(levels * reps, config.study.threads, [&](int task) {
        const int level = task / reps;
        const int rep = task % reps;
        const Eigen::Index n = grid[static_cast<std::size_t>(level)];
        RateRow& row = report.rows[static_cast<std::size_t>(task)];
        row.n = n;
        row.rep = rep;
        row.k = bases[static_cast<std::size_t>(level)].size();
        if (config.synthetic_oracle) {
            row.sup_error = row.l2_error = config.synthetic_constant * std::exp(-rate * log_n_over_log(n));
            return;
        }
        const Sample s = gen_sample(config.dgp, n, derive_seed(config.study.seed, static_cast<std::uint64_t>(level),
                                                               static_cast<std::uint64_t>(rep)));
        const FitResult f = SeriesRegression(bases[static_cast<std::size_t>(level)], s.x).fit(s.y);
        const Probe& sp = sup_probe[static_cast<std::size_t>(level)];
        row.sup_error = (sp.design * f.coeffs - sp.truth).cwiseAbs().maxCoeff();
        const Probe& lp = l2_probe[static_cast<std::size_t>(level)];
        row.l2_error = std::sqrt((lp.design * f.coeffs - lp.truth).array().square().matrix().dot(lp.weights));
    });

    std::vector<double> x, ysup, yl2;
    for (int level = 0; level < levels; ++level) {
        std::vector<double> sup, l2;
        for (int rep = 0; rep < reps; ++rep) {
            const RateRow& r = report.rows[static_cast<std::size_t>(level * reps + rep)];
            sup.push_back(r.sup_error);
            l2.push_back(r.l2_error);
        }
        const Eigen::Index n = grid[static_cast<std::size_t>(level)];
        report.levels.push_back({n, bases[static_cast<std::size_t>(level)].size(), median(sup), median(l2)});
        x.push_back(log_n_over_log(n));
        ysup.push_back(std::log(report.levels.back().median_sup));
        yl2.push_back(std::log(report.levels.back().median_l2));
    }
    if (levels >= 2) {
        report.sup_fit = fit_line(x, ysup);
        report.l2_fit = fit_line(x, yl2);
    }
    return report;
}

// ------------------------------------------------------------ coverage study

CoverageStudyReport coverage_study(const CoverageStudyConfig& config) {
    check_settings(config.study);
    config.dgp.validate();
    if (config.study.n_grid.size() != 1) throw ConfigError("coverage study needs exactly one n in n_grid");
    if (config.functionals.empty()) throw ConfigError("coverage study needs at least one functional");
    CoverageStudyReport report;
    report.n = config.study.n_grid.front();
    const BasisSystem basis =
        build_basis(config.krule ? basis_for_size(config.basis, config.krule->target(report.n)) : config.basis);
    report.k = basis.size();
    const double level = 1.0 - config.study.alpha;
    const Function h0 = config.dgp.h0_function();
    std::vector<double> truth;
    for (const auto& f : config.functionals) truth.push_back(functional_truth(f, basis, h0));

    const int reps = config.study.reps;
    const std::size_t nf = config.functionals.size();
    report.rows.resize(static_cast<std::size_t>(reps) * nf);
    parallel_for(reps, config.study.threads, [&](int rep) {
        const Sample s = gen_sample(config.dgp, report.n, derive_seed(config.study.seed, 0, static_cast<std::uint64_t>(rep)));
        const SeriesRegression regression(basis, s.x);
        const FitResult fit = regression.fit(s.y);
        for (std::size_t j = 0; j < nf; ++j) {
            CoverageRow& row = report.rows[static_cast<std::size_t>(rep) * nf + j];
            row.rep = rep;
            row.functional = config.functionals[j].name();
            try {
                const FunctionalReport r = analyze_functional(regression, fit, config.functionals[j], level, truth[j]);
                row.fhat = r.fhat;
                row.vk_hat = r.vk_hat;
                row.t = *r.tstat;
                row.lo = r.lo;
                row.hi = r.hi;
                row.covered = r.lo <= truth[j] && truth[j] <= r.hi;
            } catch (const NumericError&) {
                row.fhat = evaluate_functional(config.functionals[j], basis, fit.coeffs).value;
                row.lo = row.hi = row.fhat;
                row.t = std::numeric_limits<double>::quiet_NaN();
                row.degenerate = true;
                row.covered = row.fhat == truth[j];
            }
        }
    });

    for (std::size_t j = 0; j < nf; ++j) {
        CoverageSummary s;
        s.functional = config.functionals[j].name();
        s.truth = truth[j];
        std::vector<double> tvals;
        double length = 0.0;
        int covered = 0;
        for (int rep = 0; rep < reps; ++rep) {
            const CoverageRow& row = report.rows[static_cast<std::size_t>(rep) * nf + j];
            if (row.degenerate) {
                ++s.degenerate;
                continue;
            }
            ++s.valid;
            covered += row.covered ? 1 : 0;
            length += row.hi - row.lo;
            tvals.push_back(row.t);
        }
        if (s.valid > 0) {
            s.coverage = static_cast<double>(covered) / s.valid;
            s.mean_length = length / s.valid;
            s.ks = ks_test_normal(tvals);
        }
        report.summaries.push_back(s);
    }
    return report;
}

// ----------------------------------------------------------- stability study

std::string basis_label(const BasisSpec& spec) {
    switch (spec.family) {
        case Family::BSpline: return "bspline" + std::to_string(spec.order);
        case Family::Wavelet: return "wavelet" + std::to_string(spec.vanishing_moments);
        case Family::Trig: return "trig";
        case Family::Power: return "power";
    }
    return "";
}

BasisSpec basis_from_label(const std::string& label) {
    BasisSpec s;
    auto suffix = [&](const std::string& prefix) -> std::optional<int> {
        if (label.rfind(prefix, 0) != 0 || label.size() == prefix.size()) return std::nullopt;
        const std::string rest = label.substr(prefix.size());
        if (rest.find_first_not_of("0123456789") != std::string::npos || rest.size() > 2) return std::nullopt;
        return std::stoi(rest);
    };
    if (label == "trig") {
        s.family = Family::Trig;
    } else if (label == "power") {
        s.family = Family::Power;
    } else if (label == "haar") {
        s.family = Family::Wavelet;
        s.vanishing_moments = 1;
    } else if (auto r = suffix("bspline")) {
        s.family = Family::BSpline;
        s.order = *r;
    } else if (auto v = suffix("wavelet")) {
        s.family = Family::Wavelet;
        s.vanishing_moments = *v;
    } else {
        throw ConfigError("unknown basis label '" + label + "' (expected bspline<r>, wavelet<N>, haar, trig or power)");
    }
    return s;
}

StabilityStudyReport stability_study(const StabilityStudyConfig& config) {
    check_settings(config.study);
    if (config.bases.empty() || config.k_values.empty()) throw ConfigError("stability study needs bases and k_values");
    for (double rho : config.rhos) {
        if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
    }
    const int dim = config.bases.front().dim;
    for (const auto& b : config.bases) {
        if (b.dim != dim) throw ConfigError("all stability bases must share one dimension");
    }

    struct Entry {
        std::string label;
        BasisSystem basis;
        Eigen::MatrixXd gram;
    };
    std::vector<Entry> entries;
    for (const auto& spec : config.bases) {
        for (int k : config.k_values) {
            BasisSystem b = build_basis(basis_for_size(spec, k));
            Eigen::MatrixXd g = theoretical_gram(b, Density::uniform(dim));
            entries.push_back({basis_label(spec), std::move(b), std::move(g)});
        }
    }
    const auto& grid = config.study.n_grid;
    const int reps = config.study.reps;
    const std::size_t nn = grid.size(), nr = config.rhos.size(), ne = entries.size();
    const std::size_t tasks = nn * nr * static_cast<std::size_t>(reps);
    StabilityStudyReport report;
    report.rows.resize(ne * tasks);

    parallel_for(static_cast<int>(tasks), config.study.threads, [&](int task) {
        const std::size_t t = static_cast<std::size_t>(task);
        const std::size_t ni = t / (nr * static_cast<std::size_t>(reps));
        const std::size_t ri = (t / static_cast<std::size_t>(reps)) % nr;
        const int rep = static_cast<int>(t % static_cast<std::size_t>(reps));
        const double rho = config.rhos[ri];
        const PointSet x = gen_regressors(rho == 0.0 ? RegressorKind::IidUniform : RegressorKind::ArCopula, rho, dim,
                                          grid[ni], derive_seed(config.study.seed, ni * nr + ri, static_cast<std::uint64_t>(rep)));
        for (std::size_t e = 0; e < ne; ++e) {
            StabilityRow& row = report.rows[e * tasks + t];
            row.basis = entries[e].label;
            row.k = entries[e].basis.size();
            row.n = grid[ni];
            row.rho = rho;
            row.rep = rep;
            row.dev = gram_deviation(empirical_gram_matrix(entries[e].basis, x), entries[e].gram);
            if (config.lebesgue) {
                const LebesgueResult l = lebesgue_constant_empirical(entries[e].basis, x);
                row.lebesgue = l.value;
                row.rank_deficient = l.rank_deficient;
            } else {
                row.lebesgue = std::numeric_limits<double>::quiet_NaN();
            }
        }
    });

    for (std::size_t e = 0; e < ne; ++e) {
        for (std::size_t ri = 0; ri < nr; ++ri) {
            std::vector<double> lx, ly;
            for (std::size_t ni = 0; ni < nn; ++ni) {
                std::vector<double> dev, leb;
                for (int rep = 0; rep < reps; ++rep) {
                    const std::size_t t = (ni * nr + ri) * static_cast<std::size_t>(reps) + static_cast<std::size_t>(rep);
                    dev.push_back(report.rows[e * tasks + t].dev);
                    leb.push_back(report.rows[e * tasks + t].lebesgue);
                }
                StabilityCell c{entries[e].label, entries[e].basis.size(), grid[ni], config.rhos[ri], median(dev),
                                config.lebesgue ? median(leb) : std::numeric_limits<double>::quiet_NaN()};
                report.cells.push_back(c);
                lx.push_back(std::log(static_cast<double>(grid[ni])));
                ly.push_back(std::log(c.median_dev));
            }
            if (nn >= 2) {
                const std::string key = entries[e].label + "_K" + std::to_string(entries[e].basis.size()) + "_rho" +
                                        std::to_string(ri);
                report.dev_slopes[key] = fit_line(lx, ly);
            }
        }
    }
    return report;
}

// ------------------------------------------------------- concentration study

ConcentrationStudyReport concentration_study(const ConcentrationStudyConfig& config) {
    check_settings(config.study);
    if (config.study.n_grid.size() != 1) throw ConfigError("concentration study needs exactly one n in n_grid");
    if (config.t_points < 2) throw ConfigError("t_points must be >= 2");
    if (!(config.tail_floor > 0.0 && config.tail_floor < 1.0)) throw ConfigError("tail_floor must lie in (0, 1)");
    ConcentrationStudyReport report;
    report.n = config.study.n_grid.front();
    report.mixing = config.rho != 0.0;
    const BasisSystem basis = build_basis(config.basis);
    report.k = basis.size();
    const GramDeviationGenerator gen = make_gram_deviation_generator(basis, report.n, config.rho);
    report.R = gen.R;
    report.sigma2 = gen.sigma2;
    report.s2 = gen.s2;
    if (report.mixing) {
        if (config.q < 1 || 2 * config.q > report.n) throw ConfigError("q must satisfy 1 <= q <= n/2");
        if (report.n % config.q != 0) throw ConfigError("q must divide n so that the remainder block is empty");
        report.beta_q = ar_beta_envelope(config.rho, config.q, config.beta_constant);
    }
    auto bound = [&](double t) {
        const TailBoundInput in = gen.bound_input(t, config.q, report.beta_q);
        return report.mixing ? mixing_bound(in) : tropp_bound(in);
    };
    auto exponential_term = [&](double t) {
        return report.mixing ? bound(t) - static_cast<double>(report.n) / config.q * report.beta_q : bound(t);
    };
    double hi = 1.0;
    while (exponential_term(hi) > config.tail_floor) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (exponential_term(mid) > config.tail_floor ? lo : hi) = mid;
    }
    std::vector<double> t_grid;
    for (int i = 0; i < config.t_points; ++i) t_grid.push_back(hi * i / (config.t_points - 1));
    const double scale = report.mixing ? 6.0 : 1.0;
    const TailEstimate tail =
        empirical_tail(gen.as_generator(), t_grid, config.study.reps, config.study.seed, config.study.threads, scale);
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        ConcentrationRow row;
        row.t = t_grid[i];
        row.threshold = scale * t_grid[i];
        row.bound = bound(t_grid[i]);
        row.frequency = tail.frequency[i];
        row.se = tail.se[i];
        row.reps = tail.reps;
        row.violated = row.frequency > row.bound + 3.0 * row.se;
        report.violations += row.violated ? 1 : 0;
        report.rows.push_back(row);
    }
    return report;
}

}  // namespace sieve
