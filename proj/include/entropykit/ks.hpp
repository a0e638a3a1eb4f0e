#pragma once

#include <functional>
#include <span>

namespace entropykit {

/// sup_x |F_n(x) - F(x)| for a continuous reference CDF.
double ks_statistic(std::span<const double> values, const std::function<double(double)>& cdf);

/// One-sample statistic against Uniform[0, 1].
double ks_statistic_uniform(std::span<const double> values);

/// sup_x |F_a(x) - F_b(x)| between two empirical CDFs.
double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b);

/// Asymptotic Kolmogorov survival P{K > lambda} = 2 sum (-1)^(k-1) e^(-2 k^2 lambda^2).
double kolmogorov_survival(double lambda);

/// c(alpha) = sqrt(-ln(alpha / 2) / 2); 1.6276 at alpha = 0.01.
double ks_critical_coefficient(double alpha);

/// One-sample rejection threshold c(alpha) / sqrt(n).
double ks_one_sample_threshold(std::size_t n, double alpha);

/// Two-sample rejection threshold c(alpha) sqrt((n + m) / (n m)).
double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha);

}  // namespace entropykit
