#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "entropykit/distributions.hpp"
#include "entropykit/nn.hpp"
#include "entropykit/point_sample.hpp"

namespace entropykit {

// Statistics from the decomposition
//   H_n = H~_n + M_n + C_E,
//   M_n  = mean ln((n-1) mu(B(X_i, R_i))),
//   H~_n = -mean ln( mu(B(X_i, R_i)) / lambda(B(X_i, R_i)) ),
// plus the ball-mass and log-tail diagnostics. All of them need the true
// ball mass mu, so they take the generating DistributionSpec.

struct DiagnosticsOptions {
  Backend backend = Backend::Index;
  /// Cube specs with d > 1 only have a Monte Carlo ball mass; its noise
  /// shows up in the decomposition identity, so it must be asked for.
  bool allow_monte_carlo = false;
  BallMassOptions ball{};
};

struct DiagnosticsReport {
  double m_n = 0.0;
  double tilde_h_n = 0.0;
  double h_n = 0.0;
  double ball_mass_sum = 0.0;
  double empirical_log_tail = 0.0;
  std::optional<double> ks_ball_mass_uniform;  // needs n >= 50
  /// h_n - tilde_h_n - m_n - C_E; zero up to rounding.
  double decomposition_residual = 0.0;
  std::size_t n = 0;
  std::size_t d = 0;
  std::string spec;
};

/// The four terms of the decomposition from a single neighbour search.
struct Decomposition {
  double h_n = 0.0;
  double m_n = 0.0;
  double tilde_h_n = 0.0;
  double ball_mass_sum = 0.0;
};

Decomposition decompose(const PointSample& sample, const DistributionSpec& spec,
                        const DiagnosticsOptions& options = {});
Decomposition decompose(std::span<const LogPoint> points, const DistributionSpec& spec);

/// mu(B(X_i, R_i)) for every point.
std::vector<double> nn_ball_masses(const PointSample& sample, const DistributionSpec& spec,
                                   const DiagnosticsOptions& options = {});
std::vector<double> nn_ball_masses(std::span<const LogPoint> points, const DistributionSpec& spec);

double m_statistic(const PointSample& sample, const DistributionSpec& spec,
                   const DiagnosticsOptions& options = {});
double m_statistic(std::span<const LogPoint> points, const DistributionSpec& spec);

double tilde_h(const PointSample& sample, const DistributionSpec& spec,
               const DiagnosticsOptions& options = {});
double tilde_h(std::span<const LogPoint> points, const DistributionSpec& spec);

/// sum_i mu(B(X_i, R_i)); tends to 1 almost surely for every density.
double ball_mass_sum(const PointSample& sample, const DistributionSpec& spec,
                     const DiagnosticsOptions& options = {});
double ball_mass_sum(std::span<const LogPoint> points, const DistributionSpec& spec);

/// mean (ln |X_i|)^+, natural log.
double empirical_log_tail(const PointSample& sample);
double empirical_log_tail(std::span<const LogPoint> points);

/// mu(B(X_n, |X_i - X_n|)) for i < n, taking the last point as the centre.
/// These are iid Uniform[0, 1] given X_n.
std::vector<double> centre_ball_masses(const PointSample& sample, const DistributionSpec& spec,
                                       const DiagnosticsOptions& options = {});
std::vector<double> centre_ball_masses(std::span<const LogPoint> points,
                                       const DistributionSpec& spec);

/// KS statistic of centre_ball_masses against Uniform[0, 1]. Needs n >= 50.
double uniform_ball_mass_check(const PointSample& sample, const DistributionSpec& spec,
                               const DiagnosticsOptions& options = {});
double uniform_ball_mass_check(std::span<const LogPoint> points, const DistributionSpec& spec);

/// (n-1) min_i mu(B(X_n, |X_i - X_n|)), distributed as (n-1) min of n-1
/// iid uniforms.
double scaled_minimum_ball_mass(const PointSample& sample, const DistributionSpec& spec,
                                const DiagnosticsOptions& options = {});

DiagnosticsReport diagnose(const PointSample& sample, const DistributionSpec& spec,
                           const DiagnosticsOptions& options = {});
DiagnosticsReport diagnose(std::span<const LogPoint> points, const DistributionSpec& spec);

}  // namespace entropykit
