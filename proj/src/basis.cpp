#include "sieve/basis.hpp"

#include "sieve/error.hpp"
#include "sieve/keyvalue.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <set>

namespace sieve {

namespace detail {

class UnivariateBasis {
public:
    virtual ~UnivariateBasis() = default;
    [[nodiscard]] virtual int size() const = 0;
    [[nodiscard]] virtual int max_active() const = 0;
    virtual void evaluate(double u, SparseVector& out) const = 0;
    virtual void derivative(double u, SparseVector& out) const = 0;
    [[nodiscard]] virtual std::pair<double, double> support(int k) const = 0;
    [[nodiscard]] virtual std::vector<double> breakpoints() const = 0;
    [[nodiscard]] virtual std::vector<double> quadrature_breakpoints() const { return breakpoints(); }
    [[nodiscard]] virtual bool tabulated() const { return false; }
};

namespace {

std::vector<double> dyadic_points(int count) {
    std::vector<double> points(static_cast<std::size_t>(count) + 1);
    for (int k = 0; k <= count; ++k) points[static_cast<std::size_t>(k)] = static_cast<double>(k) / count;
    return points;
}

/// B-splines of order r with m uniform interior knots and full-multiplicity
/// end knots, each rescaled by sqrt(m + r).
class BSplineBasis final : public UnivariateBasis {
public:
    BSplineBasis(int order, int interior_knots)
        : order_(order), count_(interior_knots + order), scale_(std::sqrt(static_cast<double>(interior_knots + order))) {
        knots_.assign(static_cast<std::size_t>(order), 0.0);
        for (int j = 1; j <= interior_knots; ++j) knots_.push_back(static_cast<double>(j) / (interior_knots + 1));
        knots_.insert(knots_.end(), static_cast<std::size_t>(order), 1.0);
    }

    int size() const override { return count_; }
    int max_active() const override { return order_; }

    void evaluate(double u, SparseVector& out) const override {
        out.clear();
        const int span = find_span(u);
        const int p = order_ - 1;
        const auto values = basis_values(span, u, p);
        for (int j = 0; j <= p; ++j) {
            out.index.push_back(span - p + j);
            out.value.push_back(scale_ * values[static_cast<std::size_t>(j)]);
        }
    }

    void derivative(double u, SparseVector& out) const override {
        out.clear();
        const int span = find_span(u);
        const int p = order_ - 1;
        if (p == 0) {
            out.index.push_back(span);
            out.value.push_back(0.0);
            return;
        }
        // Order r-1 values at the same span: entries for N_{span-p+1 .. span, r-1}.
        const auto lower = basis_values(span, u, p - 1);
        auto low = [&](int a) -> double {
            const int j = a - (span - p + 1);
            return (j >= 0 && j < p) ? lower[static_cast<std::size_t>(j)] : 0.0;
        };
        for (int j = 0; j <= p; ++j) {
            const int a = span - p + j;
            const double d1 = knot(a + p) - knot(a);
            const double d2 = knot(a + p + 1) - knot(a + 1);
            double value = 0.0;
            if (d1 > 0.0) value += low(a) / d1;
            if (d2 > 0.0) value -= low(a + 1) / d2;
            out.index.push_back(a);
            out.value.push_back(scale_ * p * value);
        }
    }

    std::pair<double, double> support(int k) const override { return {knot(k), knot(k + order_)}; }

    std::vector<double> breakpoints() const override {
        std::vector<double> points(knots_.begin(), knots_.end());
        points.erase(std::unique(points.begin(), points.end()), points.end());
        return points;
    }

private:
    double knot(int i) const { return knots_[static_cast<std::size_t>(i)]; }

    int find_span(double u) const {
        const int last = count_ - 1;
        if (u >= 1.0) return last;
        const auto first = knots_.begin() + order_ - 1;
        const auto end = knots_.begin() + count_ + 1;
        const auto it = std::upper_bound(first, end, u);
        return std::clamp(static_cast<int>(it - knots_.begin()) - 1, order_ - 1, last);
    }

    // De Boor / Cox recursion for the degree-p functions nonzero on [t_span, t_span+1).
    std::vector<double> basis_values(int span, double u, int p) const {
        std::vector<double> n(static_cast<std::size_t>(p) + 1, 0.0), left(n.size(), 0.0), right(n.size(), 0.0);
        n[0] = 1.0;
        for (int j = 1; j <= p; ++j) {
            left[static_cast<std::size_t>(j)] = u - knot(span + 1 - j);
            right[static_cast<std::size_t>(j)] = knot(span + j) - u;
            double saved = 0.0;
            for (int r = 0; r < j; ++r) {
                const double denom = right[static_cast<std::size_t>(r) + 1] + left[static_cast<std::size_t>(j - r)];
                const double temp = denom != 0.0 ? n[static_cast<std::size_t>(r)] / denom : 0.0;
                n[static_cast<std::size_t>(r)] = saved + right[static_cast<std::size_t>(r) + 1] * temp;
                saved = left[static_cast<std::size_t>(j - r)] * temp;
            }
            n[static_cast<std::size_t>(j)] = saved;
        }
        return n;
    }

    int order_;
    int count_;
    double scale_;
    std::vector<double> knots_;
};

/// Scaling functions of level J on [0,1]: N left boundary, 2^J - 2N interior
/// and N right boundary functions (Haar when N = 1).
class WaveletBasis final : public UnivariateBasis {
public:
    WaveletBasis(int vanishing_moments, int level, std::shared_ptr<const ScalingTable> table)
        : n_(vanishing_moments),
          level_(level),
          count_(1 << level),
          amplitude_(std::sqrt(static_cast<double>(1 << level))),
          table_(std::move(table)) {}

    int size() const override { return count_; }
    int max_active() const override { return n_ == 1 ? 1 : 2 * n_; }
    bool tabulated() const override { return n_ > 1; }

    void evaluate(double u, SparseVector& out) const override {
        out.clear();
        if (n_ == 1) {
            out.index.push_back(haar_cell(u));
            out.value.push_back(amplitude_);
            return;
        }
        const double v = u * count_;
        const int width = 2 * n_ - 1;
        if (v <= width) {
            for (int k = 0; k < n_; ++k) push(out, k, table_->left_value(k, v));
        }
        const int lo = std::max(n_, static_cast<int>(std::floor(v)) - n_ + 1);
        const int hi = std::min(count_ - n_ - 1, static_cast<int>(std::ceil(v)) + n_ - 1);
        for (int k = lo; k <= hi; ++k) {
            const double t = v - k;
            if (t > -(n_ - 1) && t < n_) push(out, k, table_->phi(t));
        }
        if (v >= count_ - width) {
            for (int a = 0; a < n_; ++a) push(out, count_ - n_ + a, table_->right_value(a, v - count_));
        }
    }

    void derivative(double u, SparseVector& out) const override {
        out.clear();
        if (n_ == 1) {
            out.index.push_back(haar_cell(u));
            out.value.push_back(0.0);
            return;
        }
        const double h = table_->step() / count_;
        const double up = std::min(1.0, u + h);
        const double down = std::max(0.0, u - h);
        SparseVector hi, lo;
        evaluate(up, hi);
        evaluate(down, lo);
        std::map<int, double> diff;
        for (std::size_t i = 0; i < hi.size(); ++i) diff[hi.index[i]] += hi.value[i];
        for (std::size_t i = 0; i < lo.size(); ++i) diff[lo.index[i]] -= lo.value[i];
        for (const auto& [k, d] : diff) {
            out.index.push_back(k);
            out.value.push_back(d / (up - down));
        }
    }

    std::pair<double, double> support(int k) const override {
        const double s = count_;
        if (n_ == 1) return {k / s, (k + 1) / s};
        const int width = 2 * n_ - 1;
        if (k < n_) return {0.0, width / s};
        if (k >= count_ - n_) return {1.0 - width / s, 1.0};
        return {(k - n_ + 1) / s, (k + n_) / s};
    }

    std::vector<double> breakpoints() const override { return dyadic_points(count_); }

    std::vector<double> quadrature_breakpoints() const override {
        if (n_ == 1) return breakpoints();
        return dyadic_points(count_ << table_->depth);
    }

private:
    int haar_cell(double u) const { return std::min(count_ - 1, static_cast<int>(std::floor(u * count_))); }

    void push(SparseVector& out, int k, double value) const {
        if (value == 0.0) return;
        out.index.push_back(k);
        out.value.push_back(amplitude_ * value);
    }

    int n_;
    int level_;
    int count_;
    double amplitude_;
    std::shared_ptr<const ScalingTable> table_;
};

/// 1, sqrt2 cos(2 pi j u), sqrt2 sin(2 pi j u) for j = 1..degree.
class TrigBasis final : public UnivariateBasis {
public:
    explicit TrigBasis(int degree) : degree_(degree) {}

    int size() const override { return 2 * degree_ + 1; }
    int max_active() const override { return size(); }

    void evaluate(double u, SparseVector& out) const override {
        out.clear();
        out.index.push_back(0);
        out.value.push_back(1.0);
        for (int j = 1; j <= degree_; ++j) {
            const double a = 2.0 * std::numbers::pi * j * u;
            out.index.push_back(2 * j - 1);
            out.value.push_back(std::numbers::sqrt2 * std::cos(a));
            out.index.push_back(2 * j);
            out.value.push_back(std::numbers::sqrt2 * std::sin(a));
        }
    }

    void derivative(double u, SparseVector& out) const override {
        out.clear();
        out.index.push_back(0);
        out.value.push_back(0.0);
        for (int j = 1; j <= degree_; ++j) {
            const double w = 2.0 * std::numbers::pi * j;
            out.index.push_back(2 * j - 1);
            out.value.push_back(-std::numbers::sqrt2 * w * std::sin(w * u));
            out.index.push_back(2 * j);
            out.value.push_back(std::numbers::sqrt2 * w * std::cos(w * u));
        }
    }

    std::pair<double, double> support(int) const override { return {0.0, 1.0}; }
    std::vector<double> breakpoints() const override { return {0.0, 1.0}; }

private:
    int degree_;
};

/// Power series of the given degree, represented by the Lebesgue-orthonormal
/// shifted Legendre polynomials sqrt(2k+1) P_k(2u - 1) (same span as 1, u, ..., u^degree).
class PowerBasis final : public UnivariateBasis {
public:
    explicit PowerBasis(int degree) : degree_(degree) {}

    int size() const override { return degree_ + 1; }
    int max_active() const override { return size(); }

    void evaluate(double u, SparseVector& out) const override {
        out.clear();
        const auto p = legendre(2.0 * u - 1.0);
        for (int k = 0; k <= degree_; ++k) {
            out.index.push_back(k);
            out.value.push_back(std::sqrt(2.0 * k + 1.0) * p[static_cast<std::size_t>(k)]);
        }
    }

    void derivative(double u, SparseVector& out) const override {
        out.clear();
        const double t = 2.0 * u - 1.0;
        const auto p = legendre(t);
        std::vector<double> dp(p.size(), 0.0);
        for (int k = 1; k <= degree_; ++k) {
            // P'_k = P'_{k-2} + (2k - 1) P_{k-1}
            dp[static_cast<std::size_t>(k)] = (k >= 2 ? dp[static_cast<std::size_t>(k - 2)] : 0.0) +
                                               (2.0 * k - 1.0) * p[static_cast<std::size_t>(k - 1)];
        }
        for (int k = 0; k <= degree_; ++k) {
            out.index.push_back(k);
            out.value.push_back(2.0 * std::sqrt(2.0 * k + 1.0) * dp[static_cast<std::size_t>(k)]);
        }
    }

    std::pair<double, double> support(int) const override { return {0.0, 1.0}; }
    std::vector<double> breakpoints() const override { return {0.0, 1.0}; }

private:
    std::vector<double> legendre(double t) const {
        std::vector<double> p(static_cast<std::size_t>(degree_) + 1, 0.0);
        p[0] = 1.0;
        if (degree_ >= 1) p[1] = t;
        for (int k = 2; k <= degree_; ++k) {
            p[static_cast<std::size_t>(k)] =
                ((2.0 * k - 1.0) * t * p[static_cast<std::size_t>(k - 1)] - (k - 1.0) * p[static_cast<std::size_t>(k - 2)]) / k;
        }
        return p;
    }

    int degree_;
};

}  // namespace
}  // namespace detail

// ---------------------------------------------------------------------------

std::string to_string(Family family) {
    switch (family) {
        case Family::BSpline: return "bspline";
        case Family::Wavelet: return "wavelet";
        case Family::Trig: return "trig";
        case Family::Power: return "power";
    }
    return "unknown";
}

Family family_from_string(const std::string& name) {
    if (name == "bspline" || name == "spline") return Family::BSpline;
    if (name == "wavelet" || name == "haar") return Family::Wavelet;
    if (name == "trig") return Family::Trig;
    if (name == "power") return Family::Power;
    throw ConfigError("unknown basis family '" + name + "'");
}

bool WeightBox::contains(std::span<const double> x) const {
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (x[l] < lower[l] || x[l] > upper[l]) return false;
    }
    return true;
}

int BasisSpec::univariate_size() const {
    switch (family) {
        case Family::BSpline: return interior_knots + order;
        case Family::Wavelet: return 1 << level;
        case Family::Trig: return 2 * degree + 1;
        case Family::Power: return degree + 1;
    }
    return 0;
}

int BasisSpec::size() const {
    int k = 1;
    for (int l = 0; l < dim; ++l) k *= univariate_size();
    return k;
}

void BasisSpec::validate() const {
    if (dim < 1) throw ConfigError("dim must be a positive integer");
    switch (family) {
        case Family::BSpline:
            if (order < 1) throw ConfigError("spline order r must be >= 1");
            if (interior_knots < 0) throw ConfigError("interior_knots m must be >= 0");
            break;
        case Family::Wavelet:
            if (vanishing_moments < 1 || vanishing_moments > 3) {
                throw ConfigError("vanishing_moments N must be 1, 2 or 3");
            }
            if (level < 0 || level > 16) throw ConfigError("wavelet level J must be in [0, 16]");
            if (vanishing_moments >= 2) {
                if ((1 << level) <= 2 * vanishing_moments) {
                    throw ConfigError("wavelet level requires 2^J > 2N (got J=" + std::to_string(level) +
                                      ", N=" + std::to_string(vanishing_moments) + ")");
                }
                if ((1 << level) < 4 * vanishing_moments - 2) {
                    throw ConfigError("wavelet level requires 2^J >= 4N-2 so boundary functions do not overlap");
                }
                if (depth < 10 || depth > 20) throw ConfigError("tabulation depth R must be in [10, 20]");
            }
            break;
        case Family::Trig:
        case Family::Power:
            if (degree < 0) throw ConfigError("degree must be >= 0");
            break;
    }
    if (weight) {
        if (static_cast<int>(weight->lower.size()) != dim || static_cast<int>(weight->upper.size()) != dim) {
            throw ConfigError("weight box must have one bound per dimension");
        }
        for (int l = 0; l < dim; ++l) {
            const double lo = weight->lower[static_cast<std::size_t>(l)];
            const double hi = weight->upper[static_cast<std::size_t>(l)];
            if (!(0.0 <= lo && lo < hi && hi <= 1.0)) throw ConfigError("weight box must satisfy 0 <= lower < upper <= 1");
        }
    }
}

std::map<std::string, std::string> BasisSpec::to_key_values() const {
    std::map<std::string, std::string> out;
    out["family"] = to_string(family);
    out["dim"] = std::to_string(dim);
    switch (family) {
        case Family::BSpline:
            out["order"] = std::to_string(order);
            out["interior_knots"] = std::to_string(interior_knots);
            break;
        case Family::Wavelet:
            out["vanishing_moments"] = std::to_string(vanishing_moments);
            out["level"] = std::to_string(level);
            out["depth"] = std::to_string(depth);
            break;
        case Family::Trig:
        case Family::Power:
            out["degree"] = std::to_string(degree);
            break;
    }
    if (weight) {
        out["weight_lower"] = join(weight->lower);
        out["weight_upper"] = join(weight->upper);
    }
    return out;
}

BasisSpec BasisSpec::from_key_values(const std::map<std::string, std::string>& values) {
    static const std::set<std::string> known = {"family", "dim",   "order",        "interior_knots", "vanishing_moments",
                                                "level",  "degree", "depth",       "weight_lower",   "weight_upper"};
    check_known_keys(values, known, "basis");
    BasisSpec spec;
    spec.family = family_from_string(require_key(values, "family", "basis"));
    auto get_int = [&](const char* key, int& target) {
        if (const auto it = values.find(key); it != values.end()) target = parse_int(key, it->second);
    };
    get_int("dim", spec.dim);
    get_int("order", spec.order);
    get_int("interior_knots", spec.interior_knots);
    get_int("vanishing_moments", spec.vanishing_moments);
    get_int("level", spec.level);
    get_int("degree", spec.degree);
    get_int("depth", spec.depth);
    const auto lo = values.find("weight_lower");
    const auto hi = values.find("weight_upper");
    if ((lo == values.end()) != (hi == values.end())) {
        throw ConfigError("weight_lower and weight_upper must be given together");
    }
    if (lo != values.end()) {
        spec.weight = WeightBox{split_doubles("weight_lower", lo->second), split_doubles("weight_upper", hi->second)};
    }
    spec.validate();
    return spec;
}

// ---------------------------------------------------------------------------

BasisSystem::BasisSystem(BasisSpec spec, std::shared_ptr<const detail::UnivariateBasis> univariate)
    : spec_(std::move(spec)), univariate_(std::move(univariate)), size_(spec_.size()) {}

int BasisSystem::univariate_size() const { return univariate_->size(); }
int BasisSystem::max_active_univariate() const { return univariate_->max_active(); }

void BasisSystem::check_domain(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != spec_.dim) {
        throw DomainError("point has dimension " + std::to_string(x.size()) + ", basis has " + std::to_string(spec_.dim));
    }
    for (double v : x) {
        if (!(v >= 0.0 && v <= 1.0)) throw DomainError("point outside [0,1]^d");
    }
}

bool BasisSystem::in_weight_region(std::span<const double> x) const {
    return !spec_.weight || spec_.weight->contains(x);
}

void BasisSystem::evaluate_sparse(std::span<const double> x, SparseVector& out) const {
    check_domain(x);
    out.clear();
    if (!in_weight_region(x)) return;
    univariate_->evaluate(x[0], out);
    if (spec_.dim == 1) return;
    const int k0 = univariate_->size();
    SparseVector factor, product;
    for (int l = 1; l < spec_.dim; ++l) {
        univariate_->evaluate(x[static_cast<std::size_t>(l)], factor);
        product.clear();
        for (std::size_t i = 0; i < out.size(); ++i) {
            for (std::size_t j = 0; j < factor.size(); ++j) {
                product.index.push_back(out.index[i] * k0 + factor.index[j]);
                product.value.push_back(out.value[i] * factor.value[j]);
            }
        }
        std::swap(out, product);
    }
}

Eigen::VectorXd BasisSystem::evaluate(std::span<const double> x) const {
    SparseVector sparse;
    evaluate_sparse(x, sparse);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(size_);
    for (std::size_t i = 0; i < sparse.size(); ++i) b[sparse.index[i]] = sparse.value[i];
    return b;
}

Eigen::VectorXd BasisSystem::evaluate_univariate(double u) const {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("point outside [0,1]");
    SparseVector sparse;
    univariate_->evaluate(u, sparse);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(univariate_->size());
    for (std::size_t i = 0; i < sparse.size(); ++i) b[sparse.index[i]] = sparse.value[i];
    return b;
}

Eigen::MatrixXd BasisSystem::evaluate_gradient(std::span<const double> x) const {
    check_domain(x);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(size_, spec_.dim);
    if (!in_weight_region(x)) return grad;
    const int d = spec_.dim;
    const int k0 = univariate_->size();
    std::vector<Eigen::VectorXd> values(static_cast<std::size_t>(d)), derivs(static_cast<std::size_t>(d));
    SparseVector tmp;
    for (int l = 0; l < d; ++l) {
        const double u = x[static_cast<std::size_t>(l)];
        univariate_->evaluate(u, tmp);
        values[static_cast<std::size_t>(l)] = Eigen::VectorXd::Zero(k0);
        for (std::size_t i = 0; i < tmp.size(); ++i) values[static_cast<std::size_t>(l)][tmp.index[i]] = tmp.value[i];
        univariate_->derivative(u, tmp);
        derivs[static_cast<std::size_t>(l)] = Eigen::VectorXd::Zero(k0);
        for (std::size_t i = 0; i < tmp.size(); ++i) derivs[static_cast<std::size_t>(l)][tmp.index[i]] = tmp.value[i];
    }
    for (int k = 0; k < size_; ++k) {
        std::vector<int> idx(static_cast<std::size_t>(d));
        int rem = k;
        for (int l = d - 1; l >= 0; --l) {
            idx[static_cast<std::size_t>(l)] = rem % k0;
            rem /= k0;
        }
        for (int l = 0; l < d; ++l) {
            double g = 1.0;
            for (int m = 0; m < d; ++m) {
                const auto& source = (m == l) ? derivs : values;
                g *= source[static_cast<std::size_t>(m)][idx[static_cast<std::size_t>(m)]];
            }
            grad(k, l) = g;
        }
    }
    return grad;
}

Eigen::MatrixXd BasisSystem::design_matrix(const PointSet& sample) const {
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(sample.rows(), size_);
    SparseVector row;
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
        evaluate_sparse(row_span(sample, i), row);
        for (std::size_t j = 0; j < row.size(); ++j) design(i, row.index[j]) = row.value[j];
    }
    return design;
}

SparseRows BasisSystem::sparse_design(const PointSet& sample) const {
    SparseRows rows;
    rows.offset.reserve(static_cast<std::size_t>(sample.rows()) + 1);
    SparseVector row;
    for (Eigen::Index i = 0; i < sample.rows(); ++i) {
        evaluate_sparse(row_span(sample, i), row);
        rows.append(row);
    }
    return rows;
}

SupportBox BasisSystem::support(int k) const {
    const int d = spec_.dim;
    const int k0 = univariate_->size();
    SupportBox box{std::vector<double>(static_cast<std::size_t>(d)), std::vector<double>(static_cast<std::size_t>(d))};
    int rem = k;
    for (int l = d - 1; l >= 0; --l) {
        const auto [lo, hi] = univariate_->support(rem % k0);
        rem /= k0;
        box.lower[static_cast<std::size_t>(l)] = lo;
        box.upper[static_cast<std::size_t>(l)] = hi;
    }
    return box;
}

std::vector<double> BasisSystem::breakpoints() const {
    auto points = univariate_->breakpoints();
    if (spec_.weight) {
        for (int l = 0; l < spec_.dim; ++l) {
            points.push_back(spec_.weight->lower[static_cast<std::size_t>(l)]);
            points.push_back(spec_.weight->upper[static_cast<std::size_t>(l)]);
        }
    }
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

std::vector<double> BasisSystem::quadrature_breakpoints() const {
    auto points = univariate_->quadrature_breakpoints();
    for (double p : breakpoints()) points.push_back(p);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    return points;
}

bool BasisSystem::piecewise_linear_tabulation() const { return univariate_->tabulated(); }

// ---------------------------------------------------------------------------

std::shared_ptr<const ScalingTable> scaling_table(int vanishing_moments, int depth,
                                                  const std::filesystem::path& cache_dir) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const ScalingTable>> memo;
    const std::lock_guard lock(mutex);
    const auto key = std::make_pair(vanishing_moments, depth);
    if (const auto it = memo.find(key); it != memo.end()) return it->second;

    std::shared_ptr<const ScalingTable> table;
    std::filesystem::path file;
    if (!cache_dir.empty()) {
        file = cache_dir / ("daubechies_N" + std::to_string(vanishing_moments) + "_R" + std::to_string(depth) + ".bin");
        if (std::filesystem::exists(file)) {
            try {
                table = std::make_shared<const ScalingTable>(load_scaling_table(file, vanishing_moments, depth));
            } catch (const NumericError&) {
                table.reset();  // stale or corrupt cache: rebuild below
            }
        }
    }
    if (!table) {
        table = std::make_shared<const ScalingTable>(tabulate_daubechies(vanishing_moments, depth));
        if (!file.empty()) {
            std::filesystem::create_directories(cache_dir);
            save_scaling_table(*table, file);
        }
    }
    memo.emplace(key, table);
    return table;
}

BasisSystem build_basis(const BasisSpec& spec, const BuildOptions& options) {
    spec.validate();
    std::shared_ptr<const detail::UnivariateBasis> univariate;
    switch (spec.family) {
        case Family::BSpline:
            univariate = std::make_shared<detail::BSplineBasis>(spec.order, spec.interior_knots);
            break;
        case Family::Wavelet: {
            std::shared_ptr<const ScalingTable> table;
            if (spec.vanishing_moments > 1) table = scaling_table(spec.vanishing_moments, spec.depth, options.cache_dir);
            univariate = std::make_shared<detail::WaveletBasis>(spec.vanishing_moments, spec.level, table);
            break;
        }
        case Family::Trig:
            univariate = std::make_shared<detail::TrigBasis>(spec.degree);
            break;
        case Family::Power:
            univariate = std::make_shared<detail::PowerBasis>(spec.degree);
            break;
    }
    return BasisSystem(spec, std::move(univariate));
}

}  // namespace sieve
