#include "entropykit/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"
#include "entropykit/kdtree.hpp"
#include "entropykit/ks.hpp"
#include "entropykit/summation.hpp"

namespace entropykit {
namespace {

constexpr std::size_t kMinKsSample = 50;

void check_dimension(const PointSample& sample, const DistributionSpec& spec) {
  if (spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument,
                "counterexample diagnostics take LogPoints, not raw coordinates");
  }
  if (sample.dimension() != spec.dimension()) {
    throw Error(ErrorCode::DimensionMismatch,
                "DimensionMismatch: sample has d = " + std::to_string(sample.dimension()) +
                    " but spec has d = " + std::to_string(spec.dimension()));
  }
}

const Counterexample& counterexample_of(const DistributionSpec& spec) {
  const auto* ce = std::get_if<Counterexample>(&spec.family());
  if (ce == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "LogPoint diagnostics need the counterexample family");
  }
  return *ce;
}

BallMassOptions ball_options(const DiagnosticsOptions& options, std::size_t i) {
  BallMassOptions out = options.ball;
  out.allow_monte_carlo = options.allow_monte_carlo;
  out.seed = mix64(options.ball.seed ^ (0x51ed270b27f3a5c1ULL + i));
  return out;
}

double mass_at(const PointSample& sample, const DistributionSpec& spec,
               const DiagnosticsOptions& options, std::size_t i, double r) {
  return ball_mass(spec, sample.point(i), r, ball_options(options, i)).mass;
}

// All of the decomposition terms from ln R_i and mu_i, in nats.
Decomposition combine(std::span<const double> log_r, std::span<const double> masses, std::size_t d) {
  const std::size_t n = log_r.size();
  const double log_n1 = std::log(static_cast<double>(n - 1));
  const double log_vd = log_unit_ball_volume(d);
  const double dd = static_cast<double>(d);
  std::vector<double> m_terms(n);
  std::vector<double> h_terms(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double log_mass = std::log(masses[i]);
    const double log_volume = log_vd + dd * log_r[i];
    m_terms[i] = log_n1 + log_mass;
    h_terms[i] = log_volume - log_mass;
  }
  Decomposition p;
  p.m_n = order_free_mean(std::move(m_terms));
  p.tilde_h_n = order_free_mean(std::move(h_terms));
  p.h_n = kl_entropy_from_log_distances(log_r, d);
  p.ball_mass_sum = order_free_sum(std::vector<double>(masses.begin(), masses.end()));
  return p;
}

std::vector<double> log_of(const std::vector<double>& r) {
  std::vector<double> out(r.size());
  std::transform(r.begin(), r.end(), out.begin(), [](double v) { return std::log(v); });
  return out;
}

}  // namespace

Decomposition decompose(const PointSample& sample, const DistributionSpec& spec,
                        const DiagnosticsOptions& options) {
  check_dimension(sample, spec);
  const NnDistances nn = nn_distances(sample, options.backend);
  std::vector<double> masses(sample.size());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = mass_at(sample, spec, options, i, nn.r[i]);
  return combine(log_of(nn.r), masses, sample.dimension());
}

Decomposition decompose(std::span<const LogPoint> points, const DistributionSpec& spec) {
  const Counterexample& ce = counterexample_of(spec);
  const std::vector<double> log_r = log_nn_distances_1d(points, ce.clamp);
  const std::vector<double> masses = nn_ball_masses(points, spec);
  return combine(log_r, masses, 1);
}

namespace {

double log_norm(const LogPoint& p) {
  if (p.interval <= 9) return std::log(raw_coordinate(p));
  // ln(a_j + w_j u) = 2^j ln 2 + log1p(w_j u / a_j); the ratio underflows.
  return log_interval_start(p.interval);
}

}  // namespace

std::vector<double> nn_ball_masses(const PointSample& sample, const DistributionSpec& spec,
                                   const DiagnosticsOptions& options) {
  check_dimension(sample, spec);
  const NnDistances nn = nn_distances(sample, options.backend);
  std::vector<double> masses(sample.size());
  for (std::size_t i = 0; i < masses.size(); ++i) masses[i] = mass_at(sample, spec, options, i, nn.r[i]);
  return masses;
}

std::vector<double> nn_ball_masses(std::span<const LogPoint> points, const DistributionSpec& spec) {
  const Counterexample& ce = counterexample_of(spec);
  const std::vector<std::size_t> nearest = nearest_indices_1d(points, ce.clamp);
  std::vector<double> masses(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    masses[i] = ball_mass_through(spec, points[i], points[nearest[i]]);
  }
  return masses;
}

double m_statistic(const PointSample& sample, const DistributionSpec& spec,
                   const DiagnosticsOptions& options) {
  return decompose(sample, spec, options).m_n;
}

double m_statistic(std::span<const LogPoint> points, const DistributionSpec& spec) {
  return decompose(points, spec).m_n;
}

double tilde_h(const PointSample& sample, const DistributionSpec& spec,
               const DiagnosticsOptions& options) {
  return decompose(sample, spec, options).tilde_h_n;
}

double tilde_h(std::span<const LogPoint> points, const DistributionSpec& spec) {
  return decompose(points, spec).tilde_h_n;
}

double ball_mass_sum(const PointSample& sample, const DistributionSpec& spec,
                     const DiagnosticsOptions& options) {
  return order_free_sum(nn_ball_masses(sample, spec, options));
}

double ball_mass_sum(std::span<const LogPoint> points, const DistributionSpec& spec) {
  return order_free_sum(nn_ball_masses(points, spec));
}

double empirical_log_tail(const PointSample& sample) {
  if (sample.size() == 0) throw Error(ErrorCode::EmptyInput, "EmptyInput: empty sample");
  std::vector<double> terms(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto p = sample.point(i);
    double norm = std::fabs(p[0]);
    if (p.size() > 1) {
      double sq = 0.0;
      for (double v : p) sq += v * v;
      norm = std::sqrt(sq);
    }
    terms[i] = norm > 1.0 ? std::log(norm) : 0.0;
  }
  return order_free_mean(std::move(terms));
}

double empirical_log_tail(std::span<const LogPoint> points) {
  if (points.empty()) throw Error(ErrorCode::EmptyInput, "EmptyInput: empty sample");
  std::vector<double> terms(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].interval < 1 || points[i].interval > kMaxIntervalClamp) {
      throw Error(ErrorCode::InvalidArgument, "LogPoint interval out of range");
    }
    terms[i] = std::max(0.0, log_norm(points[i]));
  }
  return order_free_mean(std::move(terms));
}

std::vector<double> centre_ball_masses(const PointSample& sample, const DistributionSpec& spec,
                                       const DiagnosticsOptions& options) {
  check_dimension(sample, spec);
  if (sample.size() < 2) throw Error(ErrorCode::SampleTooSmall, "SampleTooSmall: need n >= 2");
  const std::size_t last = sample.size() - 1;
  std::vector<double> out(last);
  for (std::size_t i = 0; i < last; ++i) {
    const double r = std::sqrt(squared_distance(sample.point(i), sample.point(last)));
    out[i] = ball_mass(spec, sample.point(last), r, ball_options(options, last + i)).mass;
  }
  return out;
}

std::vector<double> centre_ball_masses(std::span<const LogPoint> points,
                                       const DistributionSpec& spec) {
  counterexample_of(spec);
  if (points.size() < 2) throw Error(ErrorCode::SampleTooSmall, "SampleTooSmall: need n >= 2");
  const std::size_t last = points.size() - 1;
  std::vector<double> out(last);
  for (std::size_t i = 0; i < last; ++i) out[i] = ball_mass_through(spec, points[last], points[i]);
  return out;
}

double uniform_ball_mass_check(const PointSample& sample, const DistributionSpec& spec,
                               const DiagnosticsOptions& options) {
  if (sample.size() < kMinKsSample) {
    throw Error(ErrorCode::SampleTooSmall, "SampleTooSmall: ball-mass uniformity check needs n >= 50");
  }
  return ks_statistic_uniform(centre_ball_masses(sample, spec, options));
}

double uniform_ball_mass_check(std::span<const LogPoint> points, const DistributionSpec& spec) {
  if (points.size() < kMinKsSample) {
    throw Error(ErrorCode::SampleTooSmall, "SampleTooSmall: ball-mass uniformity check needs n >= 50");
  }
  return ks_statistic_uniform(centre_ball_masses(points, spec));
}

double scaled_minimum_ball_mass(const PointSample& sample, const DistributionSpec& spec,
                                const DiagnosticsOptions& options) {
  const std::vector<double> masses = centre_ball_masses(sample, spec, options);
  return static_cast<double>(masses.size()) * *std::min_element(masses.begin(), masses.end());
}

DiagnosticsReport diagnose(const PointSample& sample, const DistributionSpec& spec,
                           const DiagnosticsOptions& options) {
  const Decomposition p = decompose(sample, spec, options);
  DiagnosticsReport report;
  report.m_n = p.m_n;
  report.tilde_h_n = p.tilde_h_n;
  report.h_n = p.h_n;
  report.ball_mass_sum = p.ball_mass_sum;
  report.empirical_log_tail = empirical_log_tail(sample);
  if (sample.size() >= kMinKsSample) {
    report.ks_ball_mass_uniform = uniform_ball_mass_check(sample, spec, options);
  }
  report.decomposition_residual = p.h_n - p.tilde_h_n - p.m_n - kEulerMascheroni;
  report.n = sample.size();
  report.d = sample.dimension();
  report.spec = spec.name();
  return report;
}

DiagnosticsReport diagnose(std::span<const LogPoint> points, const DistributionSpec& spec) {
  const Decomposition p = decompose(points, spec);
  DiagnosticsReport report;
  report.m_n = p.m_n;
  report.tilde_h_n = p.tilde_h_n;
  report.h_n = p.h_n;
  report.ball_mass_sum = p.ball_mass_sum;
  report.empirical_log_tail = empirical_log_tail(points);
  if (points.size() >= kMinKsSample) report.ks_ball_mass_uniform = uniform_ball_mass_check(points, spec);
  report.decomposition_residual = p.h_n - p.tilde_h_n - p.m_n - kEulerMascheroni;
  report.n = points.size();
  report.d = 1;
  report.spec = spec.name();
  return report;
}

}  // namespace entropykit
