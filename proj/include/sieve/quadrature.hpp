#pragma once

#include "sieve/basis.hpp"
#include "sieve/density.hpp"

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace sieve {

/// Nodes (one per row) and weights of a quadrature rule on [0,1]^d.
struct QuadratureRule {
    PointSet nodes;
    Eigen::VectorXd weights;

    [[nodiscard]] Eigen::Index size() const { return weights.size(); }
};

/// Gauss-Legendre rule with `nodes_per_panel` points on each panel [p_i, p_{i+1}].
QuadratureRule panel_rule(std::span<const double> breakpoints, int nodes_per_panel);

/// Tensor product of a univariate rule with itself.
QuadratureRule tensor_rule(const QuadratureRule& univariate, int dim);

/// Rule whose panels align with the basis breakpoints: 8 Gauss nodes per knot or
/// dyadic panel; for tabulated wavelets 2 nodes per tabulation cell (exact for the
/// piecewise-linear interpolants under a constant density). Panels are split
/// evenly until each axis has at least `min_panels` (0 selects 64 / 16 / 4 for
/// d = 1 / 2 / higher) and merged when the tensor rule would exceed `max_nodes`.
QuadratureRule basis_quadrature(const BasisSystem& basis, int min_panels = 0,
                                std::size_t max_nodes = std::size_t{1} << 21);

/// Evaluation grid for sup norms: 4096 points (d=1), 256 per axis (d=2), 16 per
/// axis otherwise, plus all basis breakpoints and their midpoints.
PointSet evaluation_grid(const BasisSystem& basis);
std::vector<double> evaluation_axis(const BasisSystem& basis);

/// Integral of g(x) f_X(x) over [0,1]^d with the given rule.
template <typename F>
double integrate(const QuadratureRule& rule, const Density& density, F&& g) {
    double sum = 0.0;
    for (Eigen::Index q = 0; q < rule.size(); ++q) {
        const auto x = row_span(rule.nodes, q);
        sum += rule.weights[q] * density(x) * g(x);
    }
    return sum;
}

}  // namespace sieve
