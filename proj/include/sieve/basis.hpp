#pragma once

#include "sieve/daubechies.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace sieve {

/// Points in [0,1]^d, one per row (row-major so each row is a contiguous span).
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline std::span<const double> row_span(const PointSet& points, Eigen::Index i) {
    return {points.data() + i * points.cols(), static_cast<std::size_t>(points.cols())};
}

enum class Family { BSpline, Wavelet, Trig, Power };

std::string to_string(Family family);
Family family_from_string(const std::string& name);

/// Axis-aligned trimming region D_n; the weight w_n is its indicator.
struct WeightBox {
    std::vector<double> lower;
    std::vector<double> upper;

    [[nodiscard]] bool contains(std::span<const double> x) const;
};

/// A concrete sieve on [0,1]^d. All dimensions share the univariate parameters,
/// so K = K0^d with K0 = m + r (splines), 2^J (wavelets), 2*degree + 1 (trig)
/// or degree + 1 (power).
struct BasisSpec {
    Family family = Family::BSpline;
    int dim = 1;
    int order = 4;               ///< spline order r (degree r-1)
    int interior_knots = 0;      ///< spline m, uniform placement
    int vanishing_moments = 1;   ///< Daubechies N
    int level = 2;               ///< wavelet resolution J
    int degree = 1;              ///< trig / power degree
    int depth = 12;              ///< wavelet tabulation depth R
    std::optional<WeightBox> weight;

    [[nodiscard]] int univariate_size() const;
    [[nodiscard]] int size() const;

    /// Throws ConfigError naming the violated constraint.
    void validate() const;

    /// Flat key-value form used by the config files.
    [[nodiscard]] std::map<std::string, std::string> to_key_values() const;
    static BasisSpec from_key_values(const std::map<std::string, std::string>& values);
};

/// Nonzero entries of a basis vector.
struct SparseVector {
    std::vector<int> index;
    std::vector<double> value;

    void clear() {
        index.clear();
        value.clear();
    }
    [[nodiscard]] std::size_t size() const { return index.size(); }
    [[nodiscard]] double dot(const Eigen::Ref<const Eigen::VectorXd>& dense) const {
        double s = 0.0;
        for (std::size_t i = 0; i < index.size(); ++i) s += value[i] * dense[index[i]];
        return s;
    }
};

/// Row-compressed basis evaluations at a set of points.
struct SparseRows {
    std::vector<std::size_t> offset{0};
    std::vector<int> index;
    std::vector<double> value;

    [[nodiscard]] Eigen::Index rows() const { return static_cast<Eigen::Index>(offset.size()) - 1; }
    void append(const SparseVector& row) {
        index.insert(index.end(), row.index.begin(), row.index.end());
        value.insert(value.end(), row.value.begin(), row.value.end());
        offset.push_back(index.size());
    }
    [[nodiscard]] double dot(Eigen::Index i, const Eigen::Ref<const Eigen::VectorXd>& dense) const {
        double s = 0.0;
        for (std::size_t j = offset[static_cast<std::size_t>(i)]; j < offset[static_cast<std::size_t>(i) + 1]; ++j) {
            s += value[j] * dense[index[j]];
        }
        return s;
    }
};

namespace detail {
class UnivariateBasis;
}

/// Closed support box of one basis function.
struct SupportBox {
    std::vector<double> lower;
    std::vector<double> upper;
};

/// Immutable, evaluable sieve b^K_w. Safe for concurrent evaluation.
class BasisSystem {
public:
    BasisSystem(BasisSpec spec, std::shared_ptr<const detail::UnivariateBasis> univariate);

    [[nodiscard]] const BasisSpec& spec() const { return spec_; }
    [[nodiscard]] int size() const { return size_; }
    [[nodiscard]] int dim() const { return spec_.dim; }
    [[nodiscard]] int univariate_size() const;
    /// Upper bound on the number of nonzero univariate functions at any point.
    [[nodiscard]] int max_active_univariate() const;

    /// b^K_w(x). Throws DomainError if x is outside [0,1]^d.
    [[nodiscard]] Eigen::VectorXd evaluate(std::span<const double> x) const;
    [[nodiscard]] Eigen::VectorXd evaluate(double x) const { return evaluate(std::span<const double>(&x, 1)); }
    void evaluate_sparse(std::span<const double> x, SparseVector& out) const;

    /// Gradient of b^K_w at x, one row per basis function (K x d).
    [[nodiscard]] Eigen::MatrixXd evaluate_gradient(std::span<const double> x) const;
    [[nodiscard]] Eigen::MatrixXd evaluate_gradient(double x) const {
        return evaluate_gradient(std::span<const double>(&x, 1));
    }

    /// Univariate values (before tensoring and weighting).
    [[nodiscard]] Eigen::VectorXd evaluate_univariate(double u) const;

    /// Rows b^K_w(X_i)' for a sample stored one observation per row.
    [[nodiscard]] Eigen::MatrixXd design_matrix(const PointSet& sample) const;
    [[nodiscard]] SparseRows sparse_design(const PointSet& sample) const;

    [[nodiscard]] SupportBox support(int k) const;
    [[nodiscard]] bool in_weight_region(std::span<const double> x) const;

    /// Sorted univariate breakpoints (knots, dyadic points, ...) including 0 and 1.
    [[nodiscard]] std::vector<double> breakpoints() const;
    /// Breakpoints used for quadrature panels; finer than breakpoints() for tabulated wavelets.
    [[nodiscard]] std::vector<double> quadrature_breakpoints() const;
    /// Whether integrands are piecewise polynomial of degree <= 2 between quadrature breakpoints.
    [[nodiscard]] bool piecewise_linear_tabulation() const;

private:
    void check_domain(std::span<const double> x) const;

    BasisSpec spec_;
    std::shared_ptr<const detail::UnivariateBasis> univariate_;
    int size_ = 0;
};

struct BuildOptions {
    /// Directory for the on-disk wavelet tabulation cache; empty disables it.
    std::filesystem::path cache_dir;
};

/// Validate the spec and construct the basis. Throws ConfigError.
BasisSystem build_basis(const BasisSpec& spec, const BuildOptions& options = {});

/// Shared tabulation for (N, R), memoized per process and optionally on disk.
std::shared_ptr<const ScalingTable> scaling_table(int vanishing_moments, int depth,
                                                  const std::filesystem::path& cache_dir = {});

}  // namespace sieve
