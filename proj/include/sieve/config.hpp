#pragma once

#include "sieve/density.hpp"
#include "sieve/keyvalue.hpp"
#include "sieve/study.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>

namespace sieve {

/// Sectioned key-value document ([section] headers, key = value lines, ';' comments).
using IniDocument = std::map<std::string, KeyValues>;

IniDocument parse_ini(const std::string& text);
IniDocument read_ini_file(const std::filesystem::path& path);

/// Throws ConfigError for sections outside `allowed` or missing `required` ones.
void check_sections(const IniDocument& doc, const std::set<std::string>& allowed, const std::set<std::string>& required);

/// Empty block when the section is absent.
const KeyValues& section(const IniDocument& doc, const std::string& name);

/// [study]: n_grid, reps, seed, alpha. `require_reps` is false for single-sample commands.
StudySettings study_settings(const KeyValues& values, bool require_reps = true);
/// [krule]: constant plus either exponent or smoothness (exponent = d / (2p + d)).
KRule krule_from(const KeyValues& values, int dim);
/// [functional]: kinds (point, exp_point, integral; comma list), x0.
std::vector<FunctionalSpec> functionals_from(const KeyValues& values, int dim);
/// [density]: kind (uniform | sine), amplitude.
Density density_from(const KeyValues& values, int dim);

RateStudyConfig rate_config(const IniDocument& doc);
CoverageStudyConfig coverage_config(const IniDocument& doc);
StabilityStudyConfig stability_config(const IniDocument& doc);
ConcentrationStudyConfig concentration_config(const IniDocument& doc);

/// Acceptance thresholds from [thresholds]: keys <metric>_min / <metric>_max.
struct Thresholds {
    std::map<std::string, double> min;
    std::map<std::string, double> max;

    [[nodiscard]] bool empty() const { return min.empty() && max.empty(); }
};

/// Throws ConfigError for metrics outside `known`.
Thresholds thresholds_from(const KeyValues& values, const std::set<std::string>& known);

/// Human-readable violations (empty when all thresholds hold). A metric that is
/// missing or NaN counts as a violation.
std::vector<std::string> check_thresholds(const Thresholds& thresholds, const std::map<std::string, double>& metrics);

}  // namespace sieve
