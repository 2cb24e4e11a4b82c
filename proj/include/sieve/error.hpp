#pragma once

#include <stdexcept>
#include <string>

namespace sieve {

/// Invalid or inconsistent configuration (basis spec, config file, study setup).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// A numeric condition that prevents a result (singular Gram, non-convergent cascade, ...).
class NumericError : public std::runtime_error {
public:
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Evaluation point outside [0,1]^d.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

}  // namespace sieve
