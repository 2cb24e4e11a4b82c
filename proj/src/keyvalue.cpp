#include "sieve/keyvalue.hpp"

#include "sieve/error.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sieve {

namespace {

std::string trim(const std::string& text) {
    const auto begin = text.find_first_not_of(" \t");
    if (begin == std::string::npos) return {};
    const auto end = text.find_last_not_of(" \t");
    return text.substr(begin, end - begin + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& text, const char* what) {
    const std::string s = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as " + what);
    }
    return value;
}

}  // namespace

int parse_int(const std::string& key, const std::string& text) { return parse_number<int>(key, text, "an integer"); }

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
    return parse_number<std::uint64_t>(key, text, "an unsigned integer");
}

double parse_double(const std::string& key, const std::string& text) {
    const double v = parse_number<double>(key, text, "a number");
    if (!std::isfinite(v)) throw ConfigError("key '" + key + "': value must be finite");
    return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string s = trim(text);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a boolean");
}

std::vector<double> split_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::vector<long> split_longs(const std::string& key, const std::string& text) {
    std::vector<long> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number<long>(key, item, "an integer"));
    if (out.empty()) throw ConfigError("key '" + key + "': empty list");
    return out;
}

std::string format_double(double value) {
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + format_double(values[i]);
    return out;
}

void check_known_keys(const KeyValues& values, const std::set<std::string>& known, const std::string& section) {
    for (const auto& entry : values) {
        if (!known.contains(entry.first)) throw ConfigError("unknown " + section + " key '" + entry.first + "'");
    }
}

const std::string& require_key(const KeyValues& values, const std::string& key, const std::string& section) {
    const auto it = values.find(key);
    if (it == values.end()) throw ConfigError("missing " + section + " key '" + key + "'");
    return it->second;
}

}  // namespace sieve
