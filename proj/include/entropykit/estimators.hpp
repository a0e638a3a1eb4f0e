#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "entropykit/interval_set.hpp"
#include "entropykit/nn.hpp"
#include "entropykit/point_sample.hpp"

namespace entropykit {

/// Euler-Mascheroni constant, -int_0^inf e^-t ln t dt.
inline constexpr double kEulerMascheroni = 0.5772156649015329;

/// Kozachenko-Leonenko estimate in nats.
struct EntropyEstimate {
  double value = 0.0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::optional<Backend> backend;  // empty for the log-domain path
  double euler_mascheroni = kEulerMascheroni;
  bool log_domain = false;
  std::optional<std::uint32_t> clamp;
};

/// Volume of the unit Euclidean ball, pi^(d/2) / Gamma(d/2 + 1).
double unit_ball_volume(std::size_t d);
/// ln v_d, via lgamma so it stays finite for any d.
double log_unit_ball_volume(std::size_t d);

/// Mean of ln(n-1) + d ln R_i + ln v_d over the sample, plus C_E.
double kl_entropy_from_log_distances(std::span<const double> log_r, std::size_t d);

EntropyEstimate kl_entropy(const PointSample& sample, Backend backend = Backend::Index,
                           std::size_t threads = 1);

/// Same estimate for points of the union-of-intervals set (d = 1), using
/// log-domain neighbour distances. Lowering `clamp` never raises the value.
EntropyEstimate kl_entropy_logdomain(std::span<const LogPoint> points,
                                     std::uint32_t clamp = kDefaultIntervalClamp);

/// Leave-one-out 1-NN density f_i = 1 / ((n-1) R_i^d v_d e^C_E) at each X_i.
/// -mean(ln f_i) reproduces kl_entropy exactly up to rounding.
std::vector<double> one_nn_density(const PointSample& sample, Backend backend = Backend::Index);

/// l_n = mean of log2(1 / (n Z_i)), base 2, without the C_E correction.
/// Requires d = 1 (DimensionMismatch otherwise).
double ell_statistic(const PointSample& sample, Backend backend = Backend::Index);
double ell_statistic(std::span<const LogPoint> points, std::uint32_t clamp = kDefaultIntervalClamp);

}  // namespace entropykit
