#pragma once

#include "sieve/config.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sieve {

struct CommandOptions {
    std::optional<std::uint64_t> seed;   ///< overrides [study] seed
    int threads = 1;
    bool synthetic_oracle = false;       ///< rate-study only
    std::filesystem::path config_dir;    ///< base for relative paths in the config
};

/// Everything a command produces; written by write_output.
struct CommandOutput {
    nlohmann::ordered_json summary;
    std::string detail_csv;
    std::vector<std::pair<std::string, std::string>> extra_files;   ///< (file name, contents)
    std::map<std::string, double> metrics;
    std::vector<std::string> threshold_failures;
    std::string table;   ///< one-screen text summary
};

const std::vector<std::string>& command_names();

/// Runs a command on a parsed config. Throws ConfigError, NumericError or DomainError.
CommandOutput run_command(const std::string& command, IniDocument doc, const CommandOptions& options);

/// Writes summary.json, detail.csv and any extra files into `dir` (created if needed).
void write_output(const std::filesystem::path& dir, const CommandOutput& output);

/// Rows of a headered CSV (x columns then y) for the fit command.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
CsvData read_csv(const std::filesystem::path& path);

}  // namespace sieve
