#pragma once

#include "sieve/basis.hpp"

#include <Eigen/Dense>

#include <random>

namespace sieve::test {

inline PointSet column(const std::vector<double>& xs) {
    PointSet p(static_cast<Eigen::Index>(xs.size()), 1);
    for (std::size_t i = 0; i < xs.size(); ++i) p(static_cast<Eigen::Index>(i), 0) = xs[i];
    return p;
}

inline PointSet uniform_points(Eigen::Index n, int dim, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    PointSet p(n, dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int l = 0; l < dim; ++l) p(i, l) = u(rng);
    }
    return p;
}

inline BasisSpec spline(int order, int knots, int dim = 1) {
    BasisSpec s;
    s.family = Family::BSpline;
    s.order = order;
    s.interior_knots = knots;
    s.dim = dim;
    return s;
}

inline BasisSpec wavelet(int n, int level, int dim = 1) {
    BasisSpec s;
    s.family = Family::Wavelet;
    s.vanishing_moments = n;
    s.level = level;
    s.dim = dim;
    return s;
}

inline BasisSpec power(int degree) {
    BasisSpec s;
    s.family = Family::Power;
    s.degree = degree;
    return s;
}

inline BasisSpec trig(int degree) {
    BasisSpec s;
    s.family = Family::Trig;
    s.degree = degree;
    return s;
}

}  // namespace sieve::test
