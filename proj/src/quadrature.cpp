#include "sieve/quadrature.hpp"

#include "sieve/error.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include <algorithm>
#include <cmath>

namespace sieve {

namespace {

template <unsigned Points>
std::pair<std::vector<double>, std::vector<double>> gauss_table() {
    using rule = boost::math::quadrature::gauss<double, Points>;
    const auto& abscissa = rule::abscissa();
    const auto& weights = rule::weights();
    std::vector<double> x, w;
    for (std::size_t i = 0; i < abscissa.size(); ++i) {
        if (abscissa[i] == 0.0) {
            x.push_back(0.0);
            w.push_back(weights[i]);
        } else {
            x.push_back(-abscissa[i]);
            w.push_back(weights[i]);
            x.push_back(abscissa[i]);
            w.push_back(weights[i]);
        }
    }
    return {x, w};
}

// Nodes and weights on [-1, 1].
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int points) {
    switch (points) {
        case 2: return gauss_table<2>();
        case 4: return gauss_table<4>();
        case 8: return gauss_table<8>();
        case 16: return gauss_table<16>();
        default: throw ConfigError("unsupported Gauss-Legendre order " + std::to_string(points));
    }
}

std::vector<double> thin(const std::vector<double>& points, std::size_t max_panels) {
    if (points.size() <= max_panels + 1) return points;
    const std::size_t stride = (points.size() - 2) / max_panels + 1;
    std::vector<double> out;
    for (std::size_t i = 0; i < points.size(); i += stride) out.push_back(points[i]);
    if (out.back() != points.back()) out.push_back(points.back());
    return out;
}

std::vector<double> refine(const std::vector<double>& points, std::size_t min_panels) {
    const std::size_t panels = points.size() - 1;
    if (panels >= min_panels) return points;
    const std::size_t split = (min_panels + panels - 1) / panels;
    std::vector<double> out;
    for (std::size_t p = 0; p < panels; ++p) {
        for (std::size_t j = 0; j < split; ++j) {
            out.push_back(points[p] + (points[p + 1] - points[p]) * static_cast<double>(j) / static_cast<double>(split));
        }
    }
    out.push_back(points.back());
    return out;
}

}  // namespace

QuadratureRule panel_rule(std::span<const double> breakpoints, int nodes_per_panel) {
    const auto [x, w] = gauss_legendre(nodes_per_panel);
    const std::size_t panels = breakpoints.size() - 1;
    QuadratureRule rule;
    rule.nodes.resize(static_cast<Eigen::Index>(panels * x.size()), 1);
    rule.weights.resize(rule.nodes.rows());
    Eigen::Index q = 0;
    for (std::size_t p = 0; p < panels; ++p) {
        const double a = breakpoints[p];
        const double b = breakpoints[p + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        for (std::size_t j = 0; j < x.size(); ++j, ++q) {
            rule.nodes(q, 0) = mid + half * x[j];
            rule.weights[q] = half * w[j];
        }
    }
    return rule;
}

QuadratureRule tensor_rule(const QuadratureRule& univariate, int dim) {
    const Eigen::Index m = univariate.size();
    Eigen::Index total = 1;
    for (int l = 0; l < dim; ++l) total *= m;
    QuadratureRule rule;
    rule.nodes.resize(total, dim);
    rule.weights.resize(total);
    for (Eigen::Index q = 0; q < total; ++q) {
        Eigen::Index rem = q;
        double w = 1.0;
        for (int l = dim - 1; l >= 0; --l) {
            const Eigen::Index j = rem % m;
            rem /= m;
            rule.nodes(q, l) = univariate.nodes(j, 0);
            w *= univariate.weights[j];
        }
        rule.weights[q] = w;
    }
    return rule;
}

QuadratureRule basis_quadrature(const BasisSystem& basis, int min_panels, std::size_t max_nodes) {
    const int dim = basis.dim();
    if (min_panels <= 0) min_panels = dim == 1 ? 64 : dim == 2 ? 16 : 4;
    const int per_panel = basis.piecewise_linear_tabulation() ? 2 : 8;
    const auto per_axis_budget =
        static_cast<std::size_t>(std::floor(std::pow(static_cast<double>(max_nodes), 1.0 / dim) + 1e-9));
    const std::size_t max_panels = std::max<std::size_t>(1, per_axis_budget / static_cast<std::size_t>(per_panel));
    const auto points = thin(refine(basis.quadrature_breakpoints(), static_cast<std::size_t>(min_panels)), max_panels);
    return tensor_rule(panel_rule(points, per_panel), dim);
}

std::vector<double> evaluation_axis(const BasisSystem& basis) {
    const int dim = basis.dim();
    const int uniform = dim == 1 ? 4096 : dim == 2 ? 256 : 16;
    std::vector<double> axis;
    for (int i = 0; i < uniform; ++i) axis.push_back(static_cast<double>(i) / (uniform - 1));
    const auto bp = basis.breakpoints();
    for (std::size_t i = 0; i < bp.size(); ++i) {
        axis.push_back(bp[i]);
        if (i + 1 < bp.size()) axis.push_back(0.5 * (bp[i] + bp[i + 1]));
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());
    return axis;
}

PointSet evaluation_grid(const BasisSystem& basis) {
    const auto axis = evaluation_axis(basis);
    QuadratureRule univariate;
    univariate.nodes = Eigen::Map<const Eigen::VectorXd>(axis.data(), static_cast<Eigen::Index>(axis.size()));
    univariate.weights = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(axis.size()));
    return tensor_rule(univariate, basis.dim()).nodes;
}

}  // namespace sieve
