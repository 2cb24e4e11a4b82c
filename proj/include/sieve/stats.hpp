#pragma once

#include <functional>
#include <vector>

namespace sieve {

double median(std::vector<double> values);
double mean(const std::vector<double>& values);

/// Ordinary least squares y = intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_se = 0.0;
    double r2 = 0.0;
};

/// Needs at least two distinct x values; the standard error needs three points.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// asymptotic Kolmogorov distribution (Stephens' small-sample correction).
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);
KsResult ks_test_normal(const std::vector<double>& sample);
KsResult ks_test_uniform(const std::vector<double>& sample);

/// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

/// Lag-k sample autocorrelation.
double autocorrelation(const std::vector<double>& x, int lag);
/// Pearson correlation.
double correlation(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace sieve
