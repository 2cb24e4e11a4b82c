#pragma once

#include <span>
#include <string>

namespace sieve {

/// Closed-form regressor density on [0,1]^d, bounded away from zero and infinity.
struct Density {
    enum class Kind { Uniform, SineProduct };

    Kind kind = Kind::Uniform;
    int dim = 1;
    double amplitude = 0.0;  ///< SineProduct: prod_l (1 + a sin(2 pi x_l)), |a| < 1

    static Density uniform(int dim = 1) { return {Kind::Uniform, dim, 0.0}; }
    static Density sine_product(int dim, double amplitude);
    static Density from_string(const std::string& kind, int dim, double amplitude);

    [[nodiscard]] double operator()(std::span<const double> x) const;
    [[nodiscard]] double infimum() const;
    [[nodiscard]] double supremum() const;
};

}  // namespace sieve
