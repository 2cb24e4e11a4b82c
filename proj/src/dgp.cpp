#include "sieve/dgp.hpp"

#include "sieve/error.hpp"
#include "sieve/keyvalue.hpp"
#include "sieve/parallel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace sieve {

std::string to_string(RegressorKind kind) { return kind == RegressorKind::IidUniform ? "iid" : "ar_copula"; }

std::string to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Gaussian: return "gaussian";
        case ErrorKind::StudentT: return "student_t";
        case ErrorKind::Heteroskedastic: return "heteroskedastic";
    }
    return "gaussian";
}

std::string to_string(Innovation kind) { return kind == Innovation::Gaussian ? "gaussian" : "student_t"; }
std::string to_string(TestFunction kind) { return kind == TestFunction::Smooth ? "smooth" : "kink"; }

namespace {

RegressorKind regressor_from_string(const std::string& s) {
    if (s == "iid") return RegressorKind::IidUniform;
    if (s == "ar_copula") return RegressorKind::ArCopula;
    throw ConfigError("key 'regressor': expected iid or ar_copula, got '" + s + "'");
}

ErrorKind error_from_string(const std::string& s) {
    if (s == "gaussian") return ErrorKind::Gaussian;
    if (s == "student_t") return ErrorKind::StudentT;
    if (s == "heteroskedastic") return ErrorKind::Heteroskedastic;
    throw ConfigError("key 'error': expected gaussian, student_t or heteroskedastic, got '" + s + "'");
}

Innovation innovation_from_string(const std::string& s) {
    if (s == "gaussian") return Innovation::Gaussian;
    if (s == "student_t") return Innovation::StudentT;
    throw ConfigError("key 'innovation': expected gaussian or student_t, got '" + s + "'");
}

TestFunction test_function_from_string(const std::string& s) {
    if (s == "smooth") return TestFunction::Smooth;
    if (s == "kink") return TestFunction::Kink;
    throw ConfigError("key 'h0': expected smooth or kink, got '" + s + "'");
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double hetero_sd(std::span<const double> x) { return 0.5 + x[0] * (1.0 - x[0]); }

}  // namespace

void DgpSpec::validate() const {
    if (dim < 1) throw ConfigError("dgp dim must be >= 1");
    if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
    if (!(sigma >= 0.0)) throw ConfigError("sigma must be >= 0");
    if (!(scale >= 0.0)) throw ConfigError("scale must be >= 0");
    const bool needs_df = error == ErrorKind::StudentT ||
                          (error == ErrorKind::Heteroskedastic && innovation == Innovation::StudentT);
    if (needs_df && !(df > 2.0)) throw ConfigError("df must exceed 2 so that the error variance is finite");
    if (h0 == TestFunction::Kink) {
        if (!(smoothness > 0.0)) throw ConfigError("smoothness must be > 0");
        if (!(kink_location >= 0.0 && kink_location <= 1.0)) throw ConfigError("kink_location must lie in [0, 1]");
    }
}

double DgpSpec::h0_value(std::span<const double> x) const {
    double s = 0.0;
    for (double u : x) {
        if (h0 == TestFunction::Smooth) {
            s += std::sin(2.0 * std::numbers::pi * u) + 0.3 * std::cos(5.0 * u);
        } else {
            const double d = u - kink_location;
            const double sign = (d < 0.0 && static_cast<long>(std::floor(smoothness)) % 2 == 0) ? -1.0 : 1.0;
            s += std::sin(2.0 * std::numbers::pi * u) + kink_amplitude * sign * std::pow(std::abs(d), smoothness);
        }
    }
    return s;
}

Function DgpSpec::h0_function() const {
    return [self = *this](std::span<const double> x) { return self.h0_value(x); };
}

double DgpSpec::conditional_variance(std::span<const double> x) const {
    switch (error) {
        case ErrorKind::Gaussian: return sigma * sigma;
        case ErrorKind::StudentT: return scale * scale * df / (df - 2.0);
        case ErrorKind::Heteroskedastic: {
            const double s = hetero_sd(x);
            return s * s;
        }
    }
    return 0.0;
}

Function DgpSpec::variance_function() const {
    return [self = *this](std::span<const double> x) { return self.conditional_variance(x); };
}

double DgpSpec::declared_smoothness() const {
    return h0 == TestFunction::Smooth ? std::numeric_limits<double>::infinity() : smoothness;
}

std::map<std::string, std::string> DgpSpec::to_key_values() const {
    std::map<std::string, std::string> out;
    out["dim"] = std::to_string(dim);
    out["regressor"] = to_string(regressor);
    if (regressor == RegressorKind::ArCopula) out["rho"] = format_double(rho);
    out["error"] = to_string(error);
    switch (error) {
        case ErrorKind::Gaussian: out["sigma"] = format_double(sigma); break;
        case ErrorKind::StudentT:
            out["df"] = format_double(df);
            out["scale"] = format_double(scale);
            break;
        case ErrorKind::Heteroskedastic:
            out["innovation"] = to_string(innovation);
            if (innovation == Innovation::StudentT) out["df"] = format_double(df);
            break;
    }
    out["h0"] = to_string(h0);
    if (h0 == TestFunction::Kink) {
        out["smoothness"] = format_double(smoothness);
        out["kink_location"] = format_double(kink_location);
        out["kink_amplitude"] = format_double(kink_amplitude);
    }
    return out;
}

DgpSpec DgpSpec::from_key_values(const std::map<std::string, std::string>& values) {
    check_known_keys(values,
                     {"dim", "regressor", "rho", "error", "sigma", "df", "scale", "innovation", "h0", "smoothness",
                      "kink_location", "kink_amplitude"},
                     "dgp");
    DgpSpec d;
    auto as_string = [](const std::string&, const std::string& v) { return v; };
    std::string regressor = "iid", error = "gaussian", innovation = "gaussian", h0 = "smooth";
    read_optional(values, "regressor", regressor, as_string);
    read_optional(values, "error", error, as_string);
    read_optional(values, "innovation", innovation, as_string);
    read_optional(values, "h0", h0, as_string);
    d.regressor = regressor_from_string(regressor);
    d.error = error_from_string(error);
    d.innovation = innovation_from_string(innovation);
    d.h0 = test_function_from_string(h0);
    read_optional(values, "dim", d.dim, parse_int);
    read_optional(values, "rho", d.rho, parse_double);
    read_optional(values, "sigma", d.sigma, parse_double);
    read_optional(values, "df", d.df, parse_double);
    read_optional(values, "scale", d.scale, parse_double);
    read_optional(values, "smoothness", d.smoothness, parse_double);
    read_optional(values, "kink_location", d.kink_location, parse_double);
    read_optional(values, "kink_amplitude", d.kink_amplitude, parse_double);
    if (d.regressor == RegressorKind::IidUniform && d.rho != 0.0) throw ConfigError("rho requires regressor = ar_copula");
    d.validate();
    return d;
}

PointSet gen_regressors(RegressorKind kind, double rho, int dim, Eigen::Index n, std::uint64_t seed) {
    if (n < 1) throw ConfigError("sample size n must be >= 1");
    if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("rho must lie in (-1, 1)");
    const double r = kind == RegressorKind::ArCopula ? rho : 0.0;
    const double innovation_sd = std::sqrt(1.0 - r * r);
    std::mt19937_64 engine(derive_seed(seed, 1));
    std::normal_distribution<double> normal;
    PointSet x(n, dim);
    std::vector<double> latent(static_cast<std::size_t>(dim), 0.0);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int l = 0; l < dim; ++l) {
            const double z = normal(engine);
            double& state = latent[static_cast<std::size_t>(l)];
            state = i == 0 ? z : r * state + innovation_sd * z;
            x(i, l) = normal_cdf(state);
        }
    }
    return x;
}

PointSet gen_regressors(const DgpSpec& dgp, Eigen::Index n, std::uint64_t seed) {
    return gen_regressors(dgp.regressor, dgp.rho, dgp.dim, n, seed);
}

Sample gen_sample(const DgpSpec& dgp, Eigen::Index n, std::uint64_t seed) {
    dgp.validate();
    Sample s;
    s.x = gen_regressors(dgp, n, seed);
    s.errors.resize(n);
    s.h0.resize(n);
    std::mt19937_64 engine(derive_seed(seed, 2));
    std::normal_distribution<double> normal;
    std::student_t_distribution<double> student(dgp.df);
    const double unit_t = std::sqrt((dgp.df - 2.0) / dgp.df);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto x = row_span(s.x, i);
        s.h0[i] = dgp.h0_value(x);
        switch (dgp.error) {
            case ErrorKind::Gaussian: s.errors[i] = dgp.sigma * normal(engine); break;
            case ErrorKind::StudentT: s.errors[i] = dgp.scale * student(engine); break;
            case ErrorKind::Heteroskedastic: {
                const double eta = dgp.innovation == Innovation::Gaussian ? normal(engine) : unit_t * student(engine);
                s.errors[i] = hetero_sd(x) * eta;
                break;
            }
        }
    }
    s.y = s.h0 + s.errors;
    return s;
}

}  // namespace sieve
