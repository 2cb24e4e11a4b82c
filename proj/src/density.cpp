#include "sieve/density.hpp"

#include "sieve/error.hpp"

#include <cmath>
#include <numbers>

namespace sieve {

Density Density::sine_product(int dim, double amplitude) {
    if (!(std::abs(amplitude) < 1.0)) throw ConfigError("density amplitude must satisfy |a| < 1");
    return {Kind::SineProduct, dim, amplitude};
}

Density Density::from_string(const std::string& kind, int dim, double amplitude) {
    if (kind == "uniform") return uniform(dim);
    if (kind == "sine") return sine_product(dim, amplitude);
    throw ConfigError("unknown density '" + kind + "'");
}

double Density::operator()(std::span<const double> x) const {
    if (kind == Kind::Uniform) return 1.0;
    double f = 1.0;
    for (double v : x) f *= 1.0 + amplitude * std::sin(2.0 * std::numbers::pi * v);
    return f;
}

double Density::infimum() const {
    return kind == Kind::Uniform ? 1.0 : std::pow(1.0 - std::abs(amplitude), dim);
}

double Density::supremum() const {
    return kind == Kind::Uniform ? 1.0 : std::pow(1.0 + std::abs(amplitude), dim);
}

}  // namespace sieve
