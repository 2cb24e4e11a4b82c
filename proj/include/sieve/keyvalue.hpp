#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace sieve {

/// Flat key-value block of a config section.
using KeyValues = std::map<std::string, std::string>;

/// Parsers that throw ConfigError naming the offending key.
int parse_int(const std::string& key, const std::string& text);
std::uint64_t parse_u64(const std::string& key, const std::string& text);
double parse_double(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<double> split_doubles(const std::string& key, const std::string& text);
std::vector<long> split_longs(const std::string& key, const std::string& text);

/// Shortest round-trip decimal form.
std::string format_double(double value);
std::string join(const std::vector<double>& values);

/// Throws ConfigError("unknown <section> key 'k'") for keys outside `known`.
void check_known_keys(const KeyValues& values, const std::set<std::string>& known, const std::string& section);
/// Throws ConfigError("missing <section> key 'k'") when absent.
const std::string& require_key(const KeyValues& values, const std::string& key, const std::string& section);

template <typename T, typename Parse>
void read_optional(const KeyValues& values, const std::string& key, T& target, Parse parse) {
    if (const auto it = values.find(key); it != values.end()) target = parse(key, it->second);
}

}  // namespace sieve
