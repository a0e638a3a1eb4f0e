#include "entropykit/ks.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "entropykit/error.hpp"

namespace entropykit {

double ks_statistic(std::span<const double> values, const std::function<double(double)>& cdf) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "EmptyInput: KS statistic of no values");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    const double above = (static_cast<double>(i) + 1.0) / n - f;
    const double below = f - static_cast<double>(i) / n;
    worst = std::max({worst, above, below});
  }
  return worst;
}

double ks_statistic_uniform(std::span<const double> values) {
  return ks_statistic(values, [](double x) { return std::clamp(x, 0.0, 1.0); });
}

double ks_two_sample_statistic(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) {
    throw Error(ErrorCode::EmptyInput, "EmptyInput: two-sample KS needs both samples nonempty");
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size());
  const double ny = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= t) ++i;
    while (j < y.size() && y[j] <= t) ++j;
    worst = std::max(worst, std::fabs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  return worst;
}

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 0.2) return 1.0;  // series converges slowly; value is 1 to 1e-20
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-18) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "significance level must lie in (0, 1)");
  }
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

double ks_one_sample_threshold(std::size_t n, double alpha) {
  return ks_critical_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

double ks_two_sample_threshold(std::size_t n, std::size_t m, double alpha) {
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return ks_critical_coefficient(alpha) * std::sqrt((nn + mm) / (nn * mm));
}

}  // namespace entropykit
