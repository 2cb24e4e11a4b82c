#include "sieve/commands.hpp"

#include "sieve/error.hpp"
#include "sieve/gram.hpp"
#include "sieve/linalg.hpp"
#include "sieve/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace sieve {

namespace {

using Json = nlohmann::ordered_json;

// Accumulates CSV text with shortest round-trip number formatting.
class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) { cells(header); }

    template <typename... Cells>
    void row(const Cells&... values) {
        std::vector<std::string> parts{cell(values)...};
        cells(parts);
    }

    [[nodiscard]] const std::string& text() const { return text_; }

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(double v) { return std::isnan(v) ? "nan" : format_double(v); }
    static std::string cell(bool v) { return v ? "1" : "0"; }
    static std::string cell(int v) { return std::to_string(v); }
    static std::string cell(long v) { return std::to_string(v); }
    static std::string cell(long long v) { return std::to_string(v); }

    void cells(const std::vector<std::string>& parts) {
        for (std::size_t i = 0; i < parts.size(); ++i) text_ += (i ? "," : "") + parts[i];
        text_ += '\n';
    }

    std::string text_;
};

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json config_json(const IniDocument& doc) {
    Json out = Json::object();
    for (const auto& [name, values] : doc) {
        Json block = Json::object();
        for (const auto& [key, value] : values) block[key] = value;
        out[name] = block;
    }
    return out;
}

Json fit_json(const LineFit& f) {
    return Json{{"slope", number(f.slope)}, {"slope_se", number(f.slope_se)}, {"intercept", number(f.intercept)},
                {"r2", number(f.r2)}};
}

std::string fixed(double v, int digits = 4) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.*g", digits + 2, v);
    return buffer;
}

std::set<std::string> known_metrics(const std::string& command, const IniDocument& doc) {
    if (command == "rate-study") return {"slope_sup", "slope_l2", "slope_sup_se", "slope_l2_se", "r2_sup", "r2_l2"};
    if (command == "coverage-study") {
        std::set<std::string> out;
        const KeyValues& f = section(doc, "functional");
        std::stringstream ss(f.contains("kinds") ? f.at("kinds") : "");
        std::string item;
        while (std::getline(ss, item, ',')) {
            item.erase(0, item.find_first_not_of(" \t"));
            item.erase(item.find_last_not_of(" \t") + 1);
            for (const char* m : {"coverage_", "ks_pvalue_", "ks_statistic_", "mean_length_", "degenerate_"}) {
                out.insert(m + item);
            }
        }
        return out;
    }
    if (command == "stability-study") return {"max_median_lebesgue", "max_median_dev", "min_dev_slope", "max_dev_slope"};
    if (command == "concentration-study") return {"violations", "max_excess"};
    if (command == "gram-report") {
        return {"dev", "zeta", "lambda", "lebesgue_theoretical", "lebesgue_empirical", "dms_bound"};
    }
    return {};
}

// ------------------------------------------------------------------ studies

CommandOutput rate_command(const IniDocument& doc, const CommandOptions& options) {
    RateStudyConfig c = rate_config(doc);
    c.study.threads = options.threads;
    c.synthetic_oracle = options.synthetic_oracle;
    const RateStudyReport r = rate_study(c);
    CommandOutput out;
    CsvWriter csv({"n", "rep", "K", "sup_error", "l2_error"});
    for (const auto& row : r.rows) csv.row(static_cast<long>(row.n), row.rep, row.k, row.sup_error, row.l2_error);
    out.detail_csv = csv.text();
    Json levels = Json::array();
    std::ostringstream table;
    table << "rate study (" << (c.synthetic_oracle ? "synthetic oracle" : "Monte Carlo") << ", " << c.study.reps
          << " reps)\n       n     K   median sup    median L2\n";
    for (const auto& l : r.levels) {
        levels.push_back({{"n", l.n}, {"K", l.k}, {"median_sup", l.median_sup}, {"median_l2", l.median_l2}});
        char line[128];
        std::snprintf(line, sizeof(line), "%8ld %5d %12.6g %12.6g\n", static_cast<long>(l.n), l.k, l.median_sup,
                      l.median_l2);
        table << line;
    }
    table << "slope sup = " << fixed(r.sup_fit.slope) << " (se " << fixed(r.sup_fit.slope_se) << ")"
          << "   slope L2 = " << fixed(r.l2_fit.slope) << " (se " << fixed(r.l2_fit.slope_se) << ")\n";
    out.summary["levels"] = levels;
    out.summary["sup_fit"] = fit_json(r.sup_fit);
    out.summary["l2_fit"] = fit_json(r.l2_fit);
    out.summary["synthetic_oracle"] = c.synthetic_oracle;
    out.metrics = {{"slope_sup", r.sup_fit.slope}, {"slope_l2", r.l2_fit.slope},
                   {"slope_sup_se", r.sup_fit.slope_se}, {"slope_l2_se", r.l2_fit.slope_se},
                   {"r2_sup", r.sup_fit.r2}, {"r2_l2", r.l2_fit.r2}};
    out.table = table.str();
    return out;
}

CommandOutput coverage_command(const IniDocument& doc, const CommandOptions& options) {
    CoverageStudyConfig c = coverage_config(doc);
    c.study.threads = options.threads;
    const CoverageStudyReport r = coverage_study(c);
    CommandOutput out;
    CsvWriter csv({"rep", "functional", "fhat", "VK_hat", "t", "lo", "hi", "covered", "degenerate"});
    for (const auto& row : r.rows) {
        csv.row(row.rep, row.functional, row.fhat, row.vk_hat, row.t, row.lo, row.hi, row.covered, row.degenerate);
    }
    out.detail_csv = csv.text();
    std::ostringstream table;
    table << "coverage study: n = " << r.n << ", K = " << r.k << ", level " << 1.0 - c.study.alpha << "\n";
    Json summaries = Json::array();
    for (const auto& s : r.summaries) {
        summaries.push_back({{"functional", s.functional},
                             {"truth", number(s.truth)},
                             {"coverage", number(s.coverage)},
                             {"mean_length", number(s.mean_length)},
                             {"valid", s.valid},
                             {"degenerate", s.degenerate},
                             {"ks_statistic", number(s.ks.statistic)},
                             {"ks_pvalue", number(s.ks.p_value)}});
        out.metrics["coverage_" + s.functional] = s.valid > 0 ? s.coverage : std::nan("");
        out.metrics["mean_length_" + s.functional] = s.valid > 0 ? s.mean_length : std::nan("");
        out.metrics["ks_pvalue_" + s.functional] = s.valid > 0 ? s.ks.p_value : std::nan("");
        out.metrics["ks_statistic_" + s.functional] = s.valid > 0 ? s.ks.statistic : std::nan("");
        out.metrics["degenerate_" + s.functional] = s.degenerate;
        table << "  " << s.functional << ": coverage " << fixed(s.coverage) << ", mean CI length "
              << fixed(s.mean_length) << ", KS p " << fixed(s.ks.p_value) << ", degenerate " << s.degenerate << "\n";
    }
    out.summary["n"] = r.n;
    out.summary["K"] = r.k;
    out.summary["functionals"] = summaries;
    out.table = table.str();
    return out;
}

CommandOutput stability_command(const IniDocument& doc, const CommandOptions& options) {
    StabilityStudyConfig c = stability_config(doc);
    c.study.threads = options.threads;
    const StabilityStudyReport r = stability_study(c);
    CommandOutput out;
    CsvWriter csv({"basis", "K", "n", "rho", "rep", "dev", "lebesgue_empirical", "rank_deficient"});
    for (const auto& row : r.rows) {
        csv.row(row.basis, row.k, static_cast<long>(row.n), row.rho, row.rep, row.dev, row.lebesgue, row.rank_deficient);
    }
    out.detail_csv = csv.text();
    std::ostringstream table;
    table << "stability study (" << c.study.reps << " reps)\n  basis         K        n    rho   med dev   med Leb\n";
    Json cells = Json::array();
    double max_leb = -INFINITY, max_dev = -INFINITY;
    for (const auto& cell : r.cells) {
        cells.push_back({{"basis", cell.basis}, {"K", cell.k}, {"n", cell.n}, {"rho", cell.rho},
                         {"median_dev", number(cell.median_dev)}, {"median_lebesgue", number(cell.median_lebesgue)}});
        max_dev = std::max(max_dev, cell.median_dev);
        if (!std::isnan(cell.median_lebesgue)) max_leb = std::max(max_leb, cell.median_lebesgue);
        char line[160];
        std::snprintf(line, sizeof(line), "  %-10s %4d %8ld %6.3f %9.4g %9.4g\n", cell.basis.c_str(), cell.k,
                      static_cast<long>(cell.n), cell.rho, cell.median_dev, cell.median_lebesgue);
        table << line;
    }
    Json slopes = Json::object();
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& [key, f] : r.dev_slopes) {
        slopes[key] = fit_json(f);
        lo = std::min(lo, f.slope);
        hi = std::max(hi, f.slope);
        table << "  dev slope " << key << " = " << fixed(f.slope) << "\n";
    }
    out.summary["cells"] = cells;
    out.summary["dev_slopes"] = slopes;
    out.metrics = {{"max_median_lebesgue", std::isfinite(max_leb) ? max_leb : std::nan("")},
                   {"max_median_dev", max_dev},
                   {"min_dev_slope", std::isfinite(lo) ? lo : std::nan("")},
                   {"max_dev_slope", std::isfinite(hi) ? hi : std::nan("")}};
    out.table = table.str();
    return out;
}

CommandOutput concentration_command(const IniDocument& doc, const CommandOptions& options) {
    ConcentrationStudyConfig c = concentration_config(doc);
    c.study.threads = options.threads;
    const ConcentrationStudyReport r = concentration_study(c);
    CommandOutput out;
    CsvWriter csv({"t", "threshold", "bound", "freq", "se", "reps", "violated"});
    double max_excess = -INFINITY;
    std::ostringstream table;
    table << "concentration study: " << (r.mixing ? "beta-mixing" : "independent") << " bound, K = " << r.k
          << ", n = " << r.n << "\n           t      bound       freq         se\n";
    for (const auto& row : r.rows) {
        csv.row(row.t, row.threshold, row.bound, row.frequency, row.se, row.reps, row.violated);
        max_excess = std::max(max_excess, row.frequency - row.bound);
        char line[128];
        std::snprintf(line, sizeof(line), "  %10.4g %10.4g %10.4g %10.4g%s\n", row.t, row.bound, row.frequency, row.se,
                      row.violated ? "  VIOLATED" : "");
        table << line;
    }
    out.detail_csv = csv.text();
    out.summary["mixing"] = r.mixing;
    out.summary["K"] = r.k;
    out.summary["n"] = r.n;
    out.summary["R"] = r.R;
    out.summary["sigma2"] = r.sigma2;
    out.summary["s2"] = r.s2;
    out.summary["beta_q"] = r.beta_q;
    out.summary["violations"] = r.violations;
    out.metrics = {{"violations", r.violations}, {"max_excess", max_excess}};
    out.table = table.str();
    return out;
}

// Rejection sampling from a closed-form density on [0,1]^d.
PointSet sample_density(const Density& density, Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 engine(derive_seed(seed, 1));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double top = density.supremum();
    PointSet x(n, density.dim);
    std::vector<double> point(static_cast<std::size_t>(density.dim));
    for (Eigen::Index i = 0; i < n;) {
        for (double& v : point) v = unit(engine);
        if (unit(engine) * top <= density(point)) {
            for (int l = 0; l < density.dim; ++l) x(i, l) = point[static_cast<std::size_t>(l)];
            ++i;
        }
    }
    return x;
}

void matrix_csv(CsvWriter& csv, const std::string& name, const Eigen::MatrixXd& m) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) csv.row(name, static_cast<long>(i), static_cast<long>(j), m(i, j));
    }
}

CommandOutput gram_command(const IniDocument& doc) {
    check_sections(doc, {"study", "basis", "density", "thresholds"}, {"study", "basis"});
    const StudySettings s = study_settings(section(doc, "study"), false);
    if (s.n_grid.size() != 1) throw ConfigError("key 'n_grid': gram-report takes exactly one n");
    const BasisSystem basis = build_basis(BasisSpec::from_key_values(section(doc, "basis")));
    const Density density = density_from(section(doc, "density"), basis.dim());
    const PointSet x = sample_density(density, s.n_grid.front(), s.seed);
    const GramSummary g = summarize_gram(basis, x, density);
    const LebesgueResult lt = lebesgue_constant_theoretical(basis, density);
    const LebesgueResult le = lebesgue_constant_empirical(basis, x);
    const DmsBound dms = dms_bound(g.theoretical, std::max(2, 2 * g.bandwidth));
    CommandOutput out;
    CsvWriter csv({"matrix", "k0", "k1", "value"});
    matrix_csv(csv, "theoretical", g.theoretical);
    matrix_csv(csv, "empirical", g.empirical);
    out.detail_csv = csv.text();
    CsvWriter gt({"k0", "k1", "value"}), ge({"k0", "k1", "value"});
    for (Eigen::Index i = 0; i < g.theoretical.rows(); ++i) {
        for (Eigen::Index j = 0; j < g.theoretical.cols(); ++j) {
            gt.row(static_cast<long>(i), static_cast<long>(j), g.theoretical(i, j));
            ge.row(static_cast<long>(i), static_cast<long>(j), g.empirical(i, j));
        }
    }
    out.extra_files = {{"gram_theoretical.csv", gt.text()}, {"gram_empirical.csv", ge.text()}};
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.theoretical, Eigen::EigenvaluesOnly);
    out.summary["K"] = basis.size();
    out.summary["n"] = g.n;
    out.summary["dev"] = g.deviation;
    out.summary["zeta"] = g.zeta;
    out.summary["lambda"] = number(g.lambda);
    out.summary["bandwidth"] = g.bandwidth;
    out.summary["lambda_min"] = eig.eigenvalues().minCoeff();
    out.summary["lambda_max"] = eig.eigenvalues().maxCoeff();
    out.summary["lebesgue_theoretical"] = lt.value;
    out.summary["lebesgue_empirical"] = le.value;
    out.summary["empirical_rank_deficient"] = le.rank_deficient;
    out.summary["dms"] = {{"kappa", dms.kappa}, {"lambda_decay", dms.lambda_decay}, {"C", dms.C}, {"bound", dms.bound},
                          {"inverse_linf", linf_norm(pseudo_inverse_psd(g.theoretical))}};
    out.metrics = {{"dev", g.deviation},          {"zeta", g.zeta},
                   {"lambda", g.lambda},          {"lebesgue_theoretical", lt.value},
                   {"lebesgue_empirical", le.value}, {"dms_bound", dms.bound}};
    std::ostringstream table;
    table << "gram report: K = " << basis.size() << ", n = " << g.n << "\n  dev = " << fixed(g.deviation)
          << "  zeta = " << fixed(g.zeta) << "  lambda = " << fixed(g.lambda) << "  half-band = " << g.bandwidth
          << "\n  Lebesgue theoretical = " << fixed(lt.value) << "  empirical = " << fixed(le.value)
          << "\n  banded-inverse bound = " << fixed(dms.bound) << "\n";
    out.table = table.str();
    return out;
}

CommandOutput fit_command(const IniDocument& doc, const CommandOptions& options) {
    check_sections(doc, {"fit", "basis"}, {"fit", "basis"});
    const KeyValues& f = section(doc, "fit");
    check_known_keys(f, {"data", "grid"}, "fit");
    std::filesystem::path data = require_key(f, "data", "fit");
    if (data.is_relative()) data = options.config_dir / data;
    int grid_points = 512;
    read_optional(f, "grid", grid_points, parse_int);
    if (grid_points < 2) throw ConfigError("key 'grid' must be >= 2");
    const BasisSystem basis = build_basis(BasisSpec::from_key_values(section(doc, "basis")));
    const CsvData csv = read_csv(data);
    const int d = basis.dim();
    if (static_cast<int>(csv.header.size()) != d + 1) {
        throw ConfigError("data file must have " + std::to_string(d) + " x column(s) followed by y");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(csv.rows.size());
    if (n < 1) throw ConfigError("data file has no rows");
    PointSet x(n, d);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int l = 0; l < d; ++l) {
            const double v = csv.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(l)];
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("data row " + std::to_string(i + 1) + ": x outside [0,1]");
            x(i, l) = v;
        }
        y[i] = csv.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];
    }
    const SeriesRegression regression(basis, x);
    const FitResult fit = regression.fit(y);
    CommandOutput out;
    CsvWriter coeffs({"k", "coefficient"});
    for (Eigen::Index k = 0; k < fit.coeffs.size(); ++k) coeffs.row(static_cast<long>(k), fit.coeffs[k]);
    out.detail_csv = coeffs.text();
    std::vector<std::string> header;
    for (int l = 0; l < d; ++l) header.push_back(csv.header[static_cast<std::size_t>(l)]);
    header.push_back("fitted");
    CsvWriter curve(header);
    const Eigen::Index total = static_cast<Eigen::Index>(std::pow(grid_points, d));
    if (total > (Eigen::Index{1} << 22)) throw ConfigError("key 'grid': too many grid points for this dimension");
    std::vector<double> point(static_cast<std::size_t>(d));
    for (Eigen::Index g = 0; g < total; ++g) {
        Eigen::Index rest = g;
        std::string line;
        for (int l = d - 1; l >= 0; --l) {
            point[static_cast<std::size_t>(l)] = static_cast<double>(rest % grid_points) / (grid_points - 1);
            rest /= grid_points;
        }
        for (int l = 0; l < d; ++l) line += format_double(point[static_cast<std::size_t>(l)]) + ",";
        line += format_double(fit(point));
        curve.row(line);
    }
    out.extra_files = {{"fitted.csv", curve.text()}};
    const double rss = fit.residuals.squaredNorm();
    out.summary["n"] = n;
    out.summary["K"] = basis.size();
    out.summary["rank"] = fit.rank;
    out.summary["rank_deficient"] = fit.rank_deficient;
    out.summary["residual_sd"] = std::sqrt(rss / static_cast<double>(n));
    out.summary["coefficients"] = std::vector<double>(fit.coeffs.data(), fit.coeffs.data() + fit.coeffs.size());
    std::ostringstream table;
    table << "fit: n = " << n << ", K = " << basis.size() << ", rank = " << fit.rank
          << ", residual sd = " << fixed(std::sqrt(rss / static_cast<double>(n))) << "\n";
    out.table = table.str();
    return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"fit", "rate-study", "coverage-study", "stability-study",
                                                   "concentration-study", "gram-report"};
    return names;
}

CommandOutput run_command(const std::string& command, IniDocument doc, const CommandOptions& options) {
    if (options.threads < 1) throw ConfigError("--threads must be >= 1");
    if (options.synthetic_oracle && command != "rate-study") {
        throw ConfigError("--synthetic-oracle applies to rate-study only");
    }
    if (options.seed) doc["study"]["seed"] = std::to_string(*options.seed);
    const Thresholds thresholds = thresholds_from(section(doc, "thresholds"), known_metrics(command, doc));

    CommandOutput out;
    if (command == "rate-study") {
        out = rate_command(doc, options);
    } else if (command == "coverage-study") {
        out = coverage_command(doc, options);
    } else if (command == "stability-study") {
        out = stability_command(doc, options);
    } else if (command == "concentration-study") {
        out = concentration_command(doc, options);
    } else if (command == "gram-report") {
        out = gram_command(doc);
    } else if (command == "fit") {
        out = fit_command(doc, options);
    } else {
        throw ConfigError("unknown command '" + command + "'");
    }
    Json summary;
    summary["command"] = command;
    summary["config"] = config_json(doc);
    for (auto& [key, value] : out.summary.items()) summary[key] = value;
    Json metrics = Json::object();
    for (const auto& [key, value] : out.metrics) metrics[key] = number(value);
    summary["metrics"] = metrics;
    out.threshold_failures = check_thresholds(thresholds, out.metrics);
    summary["threshold_failures"] = out.threshold_failures;
    out.summary = std::move(summary);
    return out;
}

void write_output(const std::filesystem::path& dir, const CommandOutput& output) {
    std::filesystem::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& text) {
        std::ofstream file(dir / name, std::ios::binary | std::ios::trunc);
        if (!file) throw ConfigError("cannot write '" + (dir / name).string() + "'");
        file << text;
    };
    write("summary.json", output.summary.dump(2) + "\n");
    write("detail.csv", output.detail_csv);
    for (const auto& [name, text] : output.extra_files) write(name, text);
}

CsvData read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read data file '" + path.string() + "'");
    CsvData data;
    std::string line;
    std::size_t line_no = 0;
    auto split = [](const std::string& text) {
        std::vector<std::string> parts;
        std::stringstream ss(text);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (data.header.empty()) {
            data.header = split(line);
            continue;
        }
        std::vector<double> row;
        for (const auto& cell : split(line)) row.push_back(parse_double("line " + std::to_string(line_no), cell));
        if (row.size() != data.header.size()) {
            throw ConfigError("data file line " + std::to_string(line_no) + " has the wrong number of columns");
        }
        data.rows.push_back(std::move(row));
    }
    if (data.header.empty()) throw ConfigError("data file '" + path.string() + "' is empty");
    return data;
}

}  // namespace sieve
