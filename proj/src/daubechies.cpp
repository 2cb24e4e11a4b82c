#include "sieve/daubechies.hpp"

#include "sieve/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

namespace sieve {

namespace {

constexpr int kMaxCascadeIterations = 60;
constexpr double kCascadeTolerance = 1e-8;
constexpr double kCascadeStop = 1e-14;
constexpr std::array<char, 8> kCacheMagic = {'S', 'I', 'E', 'V', 'E', 'W', 'A', 'V'};
constexpr std::uint32_t kCacheVersion = 1;

double binomial(int n, int k) {
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

double interpolate(const std::vector<double>& values, double origin, double step, double u) {
    const double t = (u - origin) / step;
    if (t < 0.0) return 0.0;
    const auto last = static_cast<double>(values.size() - 1);
    if (t >= last) return t == last ? values.back() : 0.0;
    const auto i = static_cast<std::size_t>(t);
    const double frac = t - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

// Polynomial reproduction coefficient m_a(k) = integral x^a phi(x - k) dx.
double reproduction_coefficient(const std::vector<double>& moments, int power, int shift) {
    double sum = 0.0;
    for (int j = 0; j <= power; ++j) {
        sum += binomial(power, j) * std::pow(static_cast<double>(shift), power - j) * moments[j];
    }
    return sum;
}

void gram_schmidt(std::vector<std::vector<double>>& functions, double step) {
    for (std::size_t a = 0; a < functions.size(); ++a) {
        for (std::size_t b = 0; b < a; ++b) {
            const double proj = interpolant_inner_product(functions[a], functions[b], step);
            for (std::size_t m = 0; m < functions[a].size(); ++m) functions[a][m] -= proj * functions[b][m];
        }
        const double norm = std::sqrt(interpolant_inner_product(functions[a], functions[a], step));
        if (!(norm > 1e-12)) throw NumericError("boundary scaling functions are linearly dependent");
        for (double& v : functions[a]) v /= norm;
    }
}

template <typename T>
void write_pod(std::ofstream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::ifstream& in) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw NumericError("truncated scaling table cache");
    return value;
}

void write_vector(std::ofstream& out, const std::vector<double>& v) {
    write_pod<std::uint64_t>(out, v.size());
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> read_vector(std::ifstream& in) {
    const auto size = read_pod<std::uint64_t>(in);
    if (size > (std::uint64_t{1} << 32)) throw NumericError("corrupt scaling table cache");
    std::vector<double> v(size);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(size * sizeof(double)));
    if (!in) throw NumericError("truncated scaling table cache");
    return v;
}

}  // namespace

double ScalingTable::step() const { return std::ldexp(1.0, -depth); }

double ScalingTable::phi(double u) const {
    return interpolate(interior, -(vanishing_moments - 1.0), step(), u);
}

double ScalingTable::left_value(int k, double u) const {
    return interpolate(left.at(static_cast<std::size_t>(k)), 0.0, step(), u);
}

double ScalingTable::right_value(int k, double v) const {
    return interpolate(right.at(static_cast<std::size_t>(k)), -static_cast<double>(support_length()), step(), v);
}

std::vector<double> daubechies_filter(int vanishing_moments) {
    const double r2 = std::sqrt(2.0);
    switch (vanishing_moments) {
        case 1:
            return {1.0 / r2, 1.0 / r2};
        case 2: {
            const double s3 = std::sqrt(3.0);
            const double c = 4.0 * r2;
            return {(1.0 + s3) / c, (3.0 + s3) / c, (3.0 - s3) / c, (1.0 - s3) / c};
        }
        case 3: {
            // Closed form of the D6 minimum-phase filter.
            const double s = std::sqrt(10.0);
            const double t = std::sqrt(5.0 + 2.0 * s);
            const double c = 16.0 * r2;
            return {(1.0 + s + t) / c,           (5.0 + s + 3.0 * t) / c,    (10.0 - 2.0 * s + 2.0 * t) / c,
                    (10.0 - 2.0 * s - 2.0 * t) / c, (5.0 + s - 3.0 * t) / c, (1.0 + s - t) / c};
        }
        default:
            throw ConfigError("vanishing_moments must be 1, 2 or 3 (got " + std::to_string(vanishing_moments) + ")");
    }
}

std::vector<double> scaling_moments(int vanishing_moments, int max_power) {
    const auto h = daubechies_filter(vanishing_moments);
    // Moments in the standard coordinates (support [0, 2N-1]) first.
    std::vector<double> standard(static_cast<std::size_t>(max_power) + 1, 0.0);
    standard[0] = 1.0;
    for (int j = 1; j <= max_power; ++j) {
        double acc = 0.0;
        for (int i = 0; i < j; ++i) {
            double filter_moment = 0.0;
            for (std::size_t k = 0; k < h.size(); ++k) filter_moment += h[k] * std::pow(static_cast<double>(k), j - i);
            acc += binomial(j, i) * standard[i] * filter_moment;
        }
        standard[j] = std::sqrt(2.0) / std::ldexp(1.0, j + 1) * acc / (1.0 - std::ldexp(1.0, -j));
    }
    // Shift to support [-N+1, N]: mu_j = E[(z - (N-1))^j] under standard phi.
    const double shift = -(vanishing_moments - 1.0);
    std::vector<double> moments(standard.size(), 0.0);
    for (int j = 0; j <= max_power; ++j) {
        for (int i = 0; i <= j; ++i) moments[j] += binomial(j, i) * std::pow(shift, j - i) * standard[i];
    }
    return moments;
}

double interpolant_inner_product(std::span<const double> a, std::span<const double> b, double step) {
    double sum = 0.0;
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t m = 0; m + 1 < n; ++m) {
        sum += 2.0 * a[m] * b[m] + a[m] * b[m + 1] + a[m + 1] * b[m] + 2.0 * a[m + 1] * b[m + 1];
    }
    return sum * step / 6.0;
}

ScalingTable tabulate_daubechies(int vanishing_moments, int depth) {
    if (vanishing_moments < 1 || vanishing_moments > 3) {
        throw ConfigError("vanishing_moments must be 1, 2 or 3 (got " + std::to_string(vanishing_moments) + ")");
    }
    if (depth < 10 || depth > 20) throw ConfigError("tabulation depth must be in [10, 20]");

    ScalingTable table;
    table.vanishing_moments = vanishing_moments;
    table.depth = depth;
    const int n_moments = vanishing_moments;
    const int span = table.support_length();
    const std::size_t per_unit = std::size_t{1} << depth;
    const std::size_t size = static_cast<std::size_t>(span) * per_unit + 1;
    const double step = table.step();

    if (vanishing_moments == 1) {
        // Haar: exact indicator of [0,1); evaluated in closed form by the basis.
        table.interior.assign(size, 1.0);
        table.interior.back() = 0.0;
        return table;
    }

    // Cascade iteration phi <- sqrt(2) sum_k h_k phi(2x - k) in standard coordinates,
    // started from the hat function centred at 1.
    const auto h = daubechies_filter(vanishing_moments);
    std::vector<double> phi(size), next(size);
    for (std::size_t m = 0; m < size; ++m) {
        phi[m] = std::max(0.0, 1.0 - std::abs(static_cast<double>(m) * step - 1.0));
    }
    const double r2 = std::sqrt(2.0);
    double delta = 0.0;
    int iter = 0;
    while (iter < kMaxCascadeIterations) {
        ++iter;
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t k = 0; k < h.size(); ++k) {
            const std::size_t offset = k * per_unit;
            for (std::size_t m = 0; m < size; ++m) {
                const std::size_t twice = 2 * m;
                if (twice < offset) continue;
                const std::size_t idx = twice - offset;
                if (idx >= size) break;
                next[m] += r2 * h[k] * phi[idx];
            }
        }
        delta = 0.0;
        for (std::size_t m = 0; m < size; ++m) delta = std::max(delta, std::abs(next[m] - phi[m]));
        phi.swap(next);
        if (delta < kCascadeStop) break;
    }
    table.iterations = iter;
    table.last_delta = delta;
    if (delta > kCascadeTolerance) {
        throw NumericError("cascade iteration did not converge: delta " + std::to_string(delta) + " after " +
                           std::to_string(iter) + " iterations");
    }
    table.interior = phi;

    const auto moments = scaling_moments(vanishing_moments, n_moments - 1);
    const int N = vanishing_moments;
    // Left: u in [0, 2N-1], shifts k = -N+1 .. N-1.
    table.left.assign(static_cast<std::size_t>(N), std::vector<double>(size, 0.0));
    for (int a = 0; a < N; ++a) {
        auto& f = table.left[static_cast<std::size_t>(a)];
        for (int k = -N + 1; k <= N - 1; ++k) {
            const double coef = reproduction_coefficient(moments, a, k);
            const long base = static_cast<long>(N - 1 - k) * static_cast<long>(per_unit);
            for (std::size_t m = 0; m < size; ++m) {
                const long idx = static_cast<long>(m) + base;
                if (idx >= 0 && idx < static_cast<long>(size)) f[m] += coef * phi[static_cast<std::size_t>(idx)];
            }
        }
    }
    // Right: v in [-(2N-1), 0], shifts k = -N .. N-2.
    table.right.assign(static_cast<std::size_t>(N), std::vector<double>(size, 0.0));
    for (int a = 0; a < N; ++a) {
        auto& f = table.right[static_cast<std::size_t>(a)];
        for (int k = -N; k <= N - 2; ++k) {
            const double coef = reproduction_coefficient(moments, a, k);
            const long base = static_cast<long>(-N - k) * static_cast<long>(per_unit);
            for (std::size_t m = 0; m < size; ++m) {
                const long idx = static_cast<long>(m) + base;
                if (idx >= 0 && idx < static_cast<long>(size)) f[m] += coef * phi[static_cast<std::size_t>(idx)];
            }
        }
    }
    gram_schmidt(table.left, step);
    gram_schmidt(table.right, step);
    return table;
}

void save_scaling_table(const ScalingTable& table, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw NumericError("cannot open " + path.string() + " for writing");
    out.write(kCacheMagic.data(), kCacheMagic.size());
    write_pod(out, kCacheVersion);
    write_pod<std::int32_t>(out, table.vanishing_moments);
    write_pod<std::int32_t>(out, table.depth);
    write_pod<std::int32_t>(out, table.iterations);
    write_pod(out, table.last_delta);
    write_vector(out, table.interior);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(table.left.size()));
    for (const auto& f : table.left) write_vector(out, f);
    write_pod<std::uint32_t>(out, static_cast<std::uint32_t>(table.right.size()));
    for (const auto& f : table.right) write_vector(out, f);
}

ScalingTable load_scaling_table(const std::filesystem::path& path, int vanishing_moments, int depth) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NumericError("cannot open " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kCacheMagic) throw NumericError(path.string() + " is not a scaling table cache");
    if (read_pod<std::uint32_t>(in) != kCacheVersion) throw NumericError("scaling table cache version mismatch");
    ScalingTable table;
    table.vanishing_moments = read_pod<std::int32_t>(in);
    table.depth = read_pod<std::int32_t>(in);
    if (table.vanishing_moments != vanishing_moments || table.depth != depth) {
        throw NumericError("scaling table cache key mismatch");
    }
    table.iterations = read_pod<std::int32_t>(in);
    table.last_delta = read_pod<double>(in);
    table.interior = read_vector(in);
    const auto n_left = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < n_left; ++i) table.left.push_back(read_vector(in));
    const auto n_right = read_pod<std::uint32_t>(in);
    for (std::uint32_t i = 0; i < n_right; ++i) table.right.push_back(read_vector(in));
    return table;
}

}  // namespace sieve
