#include "entropykit/estimators.hpp"

#include <cmath>
#include <numbers>

#include "entropykit/error.hpp"
#include "entropykit/summation.hpp"

namespace entropykit {
namespace {

std::vector<double> logs_of(const std::vector<double>& r) {
  std::vector<double> out(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) out[i] = std::log(r[i]);
  return out;
}

double ell_from_log_distances(std::span<const double> log_r) {
  const double log_n = std::log(static_cast<double>(log_r.size()));
  std::vector<double> terms(log_r.size());
  for (std::size_t i = 0; i < log_r.size(); ++i) {
    terms[i] = -(log_n + log_r[i]) / std::numbers::ln2;
  }
  return order_free_mean(std::move(terms));
}

}  // namespace

double log_unit_ball_volume(std::size_t d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "InvalidDimension: d must be >= 1");
  const double half = static_cast<double>(d) / 2.0;
  return half * std::log(std::numbers::pi) - std::lgamma(half + 1.0);
}

double unit_ball_volume(std::size_t d) {
  if (d < 1) throw Error(ErrorCode::InvalidDimension, "InvalidDimension: d must be >= 1");
  if (d > 170) return std::exp(log_unit_ball_volume(d));
  const double half = static_cast<double>(d) / 2.0;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double kl_entropy_from_log_distances(std::span<const double> log_r, std::size_t d) {
  const std::size_t n = log_r.size();
  if (n < 2) throw Error(ErrorCode::SampleTooSmall, "SampleTooSmall: need at least 2 points");
  const double shared = std::log(static_cast<double>(n - 1)) + log_unit_ball_volume(d);
  const double dd = static_cast<double>(d);
  std::vector<double> terms(n);
  for (std::size_t i = 0; i < n; ++i) terms[i] = shared + dd * log_r[i];
  return order_free_mean(std::move(terms)) + kEulerMascheroni;
}

EntropyEstimate kl_entropy(const PointSample& sample, Backend backend, std::size_t threads) {
  const NnDistances nn = nn_distances(sample, backend, threads);
  EntropyEstimate est;
  est.value = kl_entropy_from_log_distances(logs_of(nn.r), sample.dimension());
  est.n = sample.size();
  est.d = sample.dimension();
  est.backend = backend;
  return est;
}

EntropyEstimate kl_entropy_logdomain(std::span<const LogPoint> points, std::uint32_t clamp) {
  const std::vector<double> log_r = log_nn_distances_1d(points, clamp);
  EntropyEstimate est;
  est.value = kl_entropy_from_log_distances(log_r, 1);
  est.n = points.size();
  est.d = 1;
  est.log_domain = true;
  est.clamp = clamp;
  return est;
}

std::vector<double> one_nn_density(const PointSample& sample, Backend backend) {
  const NnDistances nn = nn_distances(sample, backend);
  const double shared = std::log(static_cast<double>(sample.size() - 1)) +
                        log_unit_ball_volume(sample.dimension()) + kEulerMascheroni;
  const double dd = static_cast<double>(sample.dimension());
  std::vector<double> out(nn.r.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(-(shared + dd * std::log(nn.r[i])));
  return out;
}

double ell_statistic(const PointSample& sample, Backend backend) {
  if (sample.dimension() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: l_n is defined for d = 1 only");
  }
  return ell_from_log_distances(logs_of(nn_distances(sample, backend).r));
}

double ell_statistic(std::span<const LogPoint> points, std::uint32_t clamp) {
  return ell_from_log_distances(log_nn_distances_1d(points, clamp));
}

}  // namespace entropykit
