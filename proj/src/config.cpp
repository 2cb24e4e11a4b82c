#include "sieve/config.hpp"

#include "sieve/error.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace sieve {

namespace {

const KeyValues kNoValues;

std::string as_string(const std::string&, const std::string& v) { return v; }

std::vector<std::string> split_names(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
}

BasisSpec basis_section(const IniDocument& doc) {
    return BasisSpec::from_key_values(section(doc, "basis"));
}

}  // namespace

IniDocument parse_ini(const std::string& text) {
    boost::property_tree::ptree tree;
    std::istringstream in(text);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config parse error at line " + std::to_string(e.line()) + ": " + e.message());
    }
    IniDocument doc;
    for (const auto& [name, node] : tree) {
        if (node.empty()) throw ConfigError("key '" + name + "' appears outside any [section]");
        KeyValues& values = doc[name];
        for (const auto& [key, leaf] : node) values[key] = leaf.data();
    }
    return doc;
}

IniDocument read_ini_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_ini(buffer.str());
}

void check_sections(const IniDocument& doc, const std::set<std::string>& allowed, const std::set<std::string>& required) {
    for (const auto& entry : doc) {
        if (!allowed.contains(entry.first)) throw ConfigError("unknown config section [" + entry.first + "]");
    }
    for (const auto& name : required) {
        if (!doc.contains(name)) throw ConfigError("missing config section [" + name + "]");
    }
}

const KeyValues& section(const IniDocument& doc, const std::string& name) {
    const auto it = doc.find(name);
    return it == doc.end() ? kNoValues : it->second;
}

StudySettings study_settings(const KeyValues& values, bool require_reps) {
    check_known_keys(values, {"n_grid", "reps", "seed", "alpha"}, "study");
    StudySettings s;
    for (long n : split_longs("n_grid", require_key(values, "n_grid", "study"))) s.n_grid.push_back(n);
    if (require_reps) {
        s.reps = parse_int("reps", require_key(values, "reps", "study"));
    } else {
        s.reps = 1;
        read_optional(values, "reps", s.reps, parse_int);
    }
    if (s.reps < 1) throw ConfigError("key 'reps' must be >= 1");
    read_optional(values, "seed", s.seed, parse_u64);
    read_optional(values, "alpha", s.alpha, parse_double);
    if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw ConfigError("key 'alpha' must lie in (0, 1)");
    for (Eigen::Index n : s.n_grid) {
        if (n < 2) throw ConfigError("key 'n_grid': every n must be >= 2");
    }
    return s;
}

KRule krule_from(const KeyValues& values, int dim) {
    check_known_keys(values, {"constant", "exponent", "smoothness"}, "krule");
    KRule rule;
    read_optional(values, "constant", rule.constant, parse_double);
    const bool has_exponent = values.contains("exponent");
    const bool has_p = values.contains("smoothness");
    if (has_exponent && has_p) throw ConfigError("krule: give either 'exponent' or 'smoothness', not both");
    if (has_exponent) read_optional(values, "exponent", rule.exponent, parse_double);
    if (has_p) {
        double p = 0.0;
        read_optional(values, "smoothness", p, parse_double);
        if (!(p > 0.0)) throw ConfigError("key 'smoothness' must be > 0");
        rule.exponent = dim / (2.0 * p + dim);
    }
    if (!(rule.constant > 0.0)) throw ConfigError("key 'constant' must be > 0");
    if (!(rule.exponent > 0.0 && rule.exponent <= 1.0)) throw ConfigError("key 'exponent' must lie in (0, 1]");
    return rule;
}

std::vector<FunctionalSpec> functionals_from(const KeyValues& values, int dim) {
    check_known_keys(values, {"kinds", "x0"}, "functional");
    std::vector<FunctionalSpec> out;
    std::vector<double> x0;
    if (values.contains("x0")) x0 = split_doubles("x0", values.at("x0"));
    for (const auto& name : split_names(require_key(values, "kinds", "functional"))) {
        const auto kind = functional_kind_from_string(name);
        if (kind == FunctionalSpec::Kind::Integral) {
            out.push_back(FunctionalSpec::integral([](std::span<const double>) { return 1.0; }));
            continue;
        }
        if (x0.empty()) throw ConfigError("missing functional key 'x0'");
        if (static_cast<int>(x0.size()) != dim) throw ConfigError("key 'x0' must have one coordinate per dimension");
        for (double v : x0) {
            if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("key 'x0' must lie in [0,1]^d");
        }
        out.push_back(kind == FunctionalSpec::Kind::PointEval ? FunctionalSpec::point(x0) : FunctionalSpec::exp_point(x0));
    }
    if (out.empty()) throw ConfigError("key 'kinds' lists no functional");
    return out;
}

Density density_from(const KeyValues& values, int dim) {
    check_known_keys(values, {"kind", "amplitude"}, "density");
    std::string kind = "uniform";
    double amplitude = 0.0;
    read_optional(values, "kind", kind, as_string);
    read_optional(values, "amplitude", amplitude, parse_double);
    return Density::from_string(kind, dim, amplitude);
}

RateStudyConfig rate_config(const IniDocument& doc) {
    check_sections(doc, {"study", "dgp", "basis", "krule", "thresholds"}, {"study", "basis"});
    RateStudyConfig c;
    c.study = study_settings(section(doc, "study"));
    c.dgp = DgpSpec::from_key_values(section(doc, "dgp"));
    c.basis = basis_section(doc);
    if (c.basis.dim != c.dgp.dim) throw ConfigError("basis dim and dgp dim differ");
    c.krule = krule_from(section(doc, "krule"), c.basis.dim);
    if (c.study.n_grid.size() < 2) throw ConfigError("key 'n_grid': the rate study needs at least two sample sizes");
    return c;
}

CoverageStudyConfig coverage_config(const IniDocument& doc) {
    check_sections(doc, {"study", "dgp", "basis", "krule", "functional", "thresholds"}, {"study", "basis", "functional"});
    CoverageStudyConfig c;
    c.study = study_settings(section(doc, "study"));
    c.dgp = DgpSpec::from_key_values(section(doc, "dgp"));
    c.basis = basis_section(doc);
    if (c.basis.dim != c.dgp.dim) throw ConfigError("basis dim and dgp dim differ");
    if (doc.contains("krule")) c.krule = krule_from(section(doc, "krule"), c.basis.dim);
    c.functionals = functionals_from(section(doc, "functional"), c.basis.dim);
    if (c.study.n_grid.size() != 1) throw ConfigError("key 'n_grid': the coverage study takes exactly one n");
    return c;
}

StabilityStudyConfig stability_config(const IniDocument& doc) {
    check_sections(doc, {"study", "stability", "thresholds"}, {"study", "stability"});
    StabilityStudyConfig c;
    c.study = study_settings(section(doc, "study"));
    const KeyValues& v = section(doc, "stability");
    check_known_keys(v, {"bases", "k_values", "rho", "lebesgue", "dim"}, "stability");
    int dim = 1;
    read_optional(v, "dim", dim, parse_int);
    if (dim < 1) throw ConfigError("key 'dim' must be >= 1");
    for (const auto& label : split_names(require_key(v, "bases", "stability"))) {
        BasisSpec s = basis_from_label(label);
        s.dim = dim;
        c.bases.push_back(s);
    }
    for (long k : split_longs("k_values", require_key(v, "k_values", "stability"))) {
        if (k < 1 || k > 4096) throw ConfigError("key 'k_values': sizes must lie in [1, 4096]");
        c.k_values.push_back(static_cast<int>(k));
    }
    if (v.contains("rho")) c.rhos = split_doubles("rho", v.at("rho"));
    for (double rho : c.rhos) {
        if (!(rho > -1.0 && rho < 1.0)) throw ConfigError("key 'rho' must lie in (-1, 1)");
    }
    read_optional(v, "lebesgue", c.lebesgue, parse_bool);
    return c;
}

ConcentrationStudyConfig concentration_config(const IniDocument& doc) {
    check_sections(doc, {"study", "basis", "concentration", "thresholds"}, {"study", "basis"});
    ConcentrationStudyConfig c;
    c.study = study_settings(section(doc, "study"));
    c.basis = basis_section(doc);
    const KeyValues& v = section(doc, "concentration");
    check_known_keys(v, {"rho", "q", "beta_constant", "t_points", "tail_floor"}, "concentration");
    read_optional(v, "rho", c.rho, parse_double);
    long q = 1;
    read_optional(v, "q", q, [](const std::string& key, const std::string& text) {
        return static_cast<long>(parse_int(key, text));
    });
    c.q = q;
    read_optional(v, "beta_constant", c.beta_constant, parse_double);
    read_optional(v, "t_points", c.t_points, parse_int);
    read_optional(v, "tail_floor", c.tail_floor, parse_double);
    if (!(c.rho > -1.0 && c.rho < 1.0)) throw ConfigError("key 'rho' must lie in (-1, 1)");
    if (!(c.beta_constant > 0.0)) throw ConfigError("key 'beta_constant' must be > 0");
    if (c.study.n_grid.size() != 1) throw ConfigError("key 'n_grid': the concentration study takes exactly one n");
    return c;
}

Thresholds thresholds_from(const KeyValues& values, const std::set<std::string>& known) {
    Thresholds t;
    for (const auto& [key, text] : values) {
        const bool is_min = key.size() > 4 && key.ends_with("_min");
        const bool is_max = key.size() > 4 && key.ends_with("_max");
        const std::string metric = (is_min || is_max) ? key.substr(0, key.size() - 4) : key;
        if (!(is_min || is_max) || !known.contains(metric)) throw ConfigError("unknown thresholds key '" + key + "'");
        (is_min ? t.min : t.max)[metric] = parse_double(key, text);
    }
    return t;
}

std::vector<std::string> check_thresholds(const Thresholds& thresholds, const std::map<std::string, double>& metrics) {
    std::vector<std::string> failures;
    auto value_of = [&](const std::string& name) {
        const auto it = metrics.find(name);
        return it == metrics.end() ? std::nan("") : it->second;
    };
    for (const auto& [name, bound] : thresholds.min) {
        const double v = value_of(name);
        if (!(v >= bound)) failures.push_back(name + " = " + format_double(v) + " < " + format_double(bound));
    }
    for (const auto& [name, bound] : thresholds.max) {
        const double v = value_of(name);
        if (!(v <= bound)) failures.push_back(name + " = " + format_double(v) + " > " + format_double(bound));
    }
    return failures;
}

}  // namespace sieve
