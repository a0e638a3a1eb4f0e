#include "entropykit/distributions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/distributions/non_central_chi_squared.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>

#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"

namespace entropykit {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

[[noreturn]] void bad_parameter(const std::string& what) {
  throw Error(ErrorCode::InvalidArgument, "invalid distribution parameter: " + what);
}

double positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) bad_parameter(std::string(what) + " must be > 0");
  return v;
}

// Upper normal tail Q(t) = P{Z > t}.
double normal_upper(double t) { return 0.5 * std::erfc(t / std::numbers::sqrt2); }

// P{a <= Z <= b} for a standard normal without cancellation for short
// intervals or intervals in either tail.
double normal_interval(double a, double b) {
  if (b <= a) return 0.0;
  if (b - a < 0.25) {
    // 8-point Gauss-Legendre on the density.
    static constexpr std::array<double, 4> nodes = {0.1834346424956498, 0.5255324099163290,
                                                    0.7966664774136267, 0.9602898564975363};
    static constexpr std::array<double, 4> weights = {0.3626837833783620, 0.3137066458778873,
                                                      0.2223810344533745, 0.1012285362903763};
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double acc = 0.0;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double lo = mid - half * nodes[k];
      const double hi = mid + half * nodes[k];
      acc += weights[k] * (std::exp(-0.5 * lo * lo) + std::exp(-0.5 * hi * hi));
    }
    return acc * half / std::sqrt(2.0 * std::numbers::pi);
  }
  if (a >= 0.0) return normal_upper(a) - normal_upper(b);
  if (b <= 0.0) return normal_upper(-b) - normal_upper(-a);
  return 1.0 - normal_upper(b) - normal_upper(-a);
}

// atan(b) - atan(a) for b >= a, stable when a and b are close.
double atan_gap(double a, double b) {
  const double prod = a * b;
  if (prod > -1.0) return std::atan((b - a) / (1.0 + prod));
  if (prod < -1.0) return std::numbers::pi + std::atan((b - a) / (1.0 + prod));
  return std::numbers::pi / 2.0;
}

double one_dim_ball_mass(const DistributionSpec::Family& family, double x, double r) {
  const double lo = x - r;
  const double hi = x + r;
  return std::visit(
      overloaded{
          [&](const UniformCube& u) {
            const double len = std::min(hi, u.side) - std::max(lo, 0.0);
            return len <= 0.0 ? 0.0 : std::min(1.0, len / u.side);
          },
          [&](const IsotropicGaussian& g) { return normal_interval(lo / g.sigma, hi / g.sigma); },
          [&](const Exponential& e) {
            if (hi <= 0.0) return 0.0;
            if (lo >= 0.0) return 2.0 * std::exp(-e.rate * x) * std::sinh(e.rate * r);
            return -std::expm1(-e.rate * hi);
          },
          [&](const Cauchy& c) { return atan_gap(lo / c.scale, hi / c.scale) / std::numbers::pi; },
          [&](const Counterexample& ce) {
            // Only the intervals whose start is a finite double can meet a
            // finite ball.
            double mass = 0.0;
            const std::uint32_t last = std::min<std::uint32_t>(ce.clamp, 9);
            for (std::uint32_t k = 1; k <= last; ++k) {
              const double start = interval_start(k);
              const double width = interval_width(k);
              const double len = std::min(hi, start + width) - std::max(lo, start);
              if (len <= 0.0) continue;
              const double interval_mass = k < ce.clamp ? width : 1.0 / ce.clamp;
              mass += interval_mass * std::min(1.0, len / width);
            }
            return std::min(mass, 1.0);
          },
      },
      family);
}

double cube_ball_mass_monte_carlo(const UniformCube& cube, std::span<const double> x, double r,
                                  const BallMassOptions& options, double& standard_error) {
  const std::size_t d = cube.d;
  // Exact answers for a ball that misses the cube or swallows it.
  double near_sq = 0.0;
  double far_sq = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double below = std::max(0.0, -x[k]);
    const double above = std::max(0.0, x[k] - cube.side);
    const double near = std::max(below, above);
    const double far = std::max(std::fabs(x[k]), std::fabs(x[k] - cube.side));
    near_sq += near * near;
    far_sq += far * far;
  }
  standard_error = 0.0;
  if (near_sq > r * r) return 0.0;
  if (far_sq <= r * r) return 1.0;

  RngStream rng(derive_stream_key(options.seed, 0, 0, StreamPurpose::BallMassMonteCarlo));
  const double log_ball = log_unit_ball_volume(d) + static_cast<double>(d) * std::log(r);
  const double log_cube = static_cast<double>(d) * std::log(cube.side);
  // Sample inside whichever of the two bodies is smaller.
  const bool sample_ball = log_ball < log_cube;
  const double scale = sample_ball ? std::exp(log_ball - log_cube) : 1.0;

  constexpr std::size_t kBatch = 10'000;
  std::size_t total = 0;
  std::size_t hits = 0;
  std::vector<double> y(d);
  while (total < options.budget) {
    const std::size_t batch = std::min(kBatch, options.budget - total);
    for (std::size_t s = 0; s < batch; ++s) {
      bool inside = true;
      if (sample_ball) {
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          y[k] = rng.normal();
          norm_sq += y[k] * y[k];
        }
        const double radius = r * std::pow(rng.uniform(), 1.0 / static_cast<double>(d)) /
                              std::sqrt(norm_sq);
        for (std::size_t k = 0; k < d && inside; ++k) {
          const double c = x[k] + radius * y[k];
          inside = c >= 0.0 && c <= cube.side;
        }
      } else {
        double dist_sq = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double diff = cube.side * rng.uniform() - x[k];
          dist_sq += diff * diff;
        }
        inside = dist_sq <= r * r;
      }
      hits += inside ? 1 : 0;
    }
    total += batch;
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    const double nt = static_cast<double>(total);
    // The 1/N floor keeps an all-hit or all-miss batch from claiming SE 0.
    standard_error = scale * std::sqrt((p * (1.0 - p) + 1.0 / nt) / nt);
    if (standard_error <= options.target_standard_error) return std::min(1.0, scale * p);
  }
  throw Error(ErrorCode::PrecisionUnachievable,
              "PrecisionUnachievable: Monte Carlo ball mass reached SE " +
                  std::to_string(standard_error) + " after " + std::to_string(total) + " draws");
}

double counterexample_mass(const Counterexample& ce, std::uint32_t k) {
  return k < ce.clamp ? interval_width(k) : 1.0 / static_cast<double>(ce.clamp);
}

// Total mass of intervals first..last (inclusive); telescopes exactly.
double counterexample_mass_range(const Counterexample& ce, std::uint32_t first,
                                 std::uint32_t last) {
  if (first > last) return 0.0;
  const double lo = 1.0 / static_cast<double>(first);
  if (last >= ce.clamp) return lo;
  return lo - 1.0 / (static_cast<double>(last) + 1.0);
}

// Density of ||X|| for N(0, sigma^2 I_d), evaluated in log space.
double chi_radius_density(double r, std::size_t d, double sigma) {
  const double dd = static_cast<double>(d);
  const double log_norm = (dd / 2.0 - 1.0) * std::numbers::ln2 + std::lgamma(dd / 2.0) +
                          dd * std::log(sigma);
  return std::exp((dd - 1.0) * std::log(r) - r * r / (2.0 * sigma * sigma) - log_norm);
}

}  // namespace

DistributionSpec::DistributionSpec(Family family) : family_(std::move(family)) {
  std::visit(overloaded{
                 [](const UniformCube& u) {
                   if (u.d < 1) bad_parameter("d must be >= 1");
                   positive(u.side, "side");
                 },
                 [](const IsotropicGaussian& g) {
                   if (g.d < 1) bad_parameter("d must be >= 1");
                   positive(g.sigma, "sigma");
                 },
                 [](const Exponential& e) { positive(e.rate, "rate"); },
                 [](const Cauchy& c) { positive(c.scale, "scale"); },
                 [](const Counterexample& c) {
                   if (c.clamp < 1 || c.clamp > kMaxIntervalClamp) {
                     bad_parameter("clamp must lie in [1, 1000]");
                   }
                 },
             },
             family_);
}

std::size_t DistributionSpec::dimension() const noexcept {
  return std::visit(overloaded{
                        [](const UniformCube& u) { return u.d; },
                        [](const IsotropicGaussian& g) { return g.d; },
                        [](const auto&) { return std::size_t{1}; },
                    },
                    family_);
}

std::string DistributionSpec::name() const {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const UniformCube& u) { os << "uniform_cube(d=" << u.d << ",side=" << u.side << ")"; },
                 [&](const IsotropicGaussian& g) {
                   os << "gaussian(d=" << g.d << ",sigma=" << g.sigma << ")";
                 },
                 [&](const Exponential& e) { os << "exponential(rate=" << e.rate << ")"; },
                 [&](const Cauchy& c) { os << "cauchy(scale=" << c.scale << ")"; },
                 [&](const Counterexample& c) { os << "counterexample(clamp=" << c.clamp << ")"; },
             },
             family_);
  return os.str();
}

DistributionSpec DistributionSpec::from_json(const nlohmann::json& j) {
  auto fail = [](const std::string& what) -> DistributionSpec {
    throw Error(ErrorCode::ParseError, "invalid distribution spec: " + what);
  };
  if (!j.is_object()) return fail("expected a JSON object");
  if (!j.contains("family") || !j["family"].is_string()) return fail("missing string 'family'");
  const std::string family = j["family"].get<std::string>();

  auto check_keys = [&](std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
      if (key == "family") continue;
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
        fail("unknown key '" + key + "' for family '" + family + "'");
      }
    }
  };
  auto number = [&](const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) fail(std::string("'") + key + "' must be a number");
    return j[key].get<double>();
  };
  auto count = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_unsigned()) fail(std::string("'") + key + "' must be a positive integer");
    return j[key].get<std::uint64_t>();
  };

  try {
    if (family == "uniform_cube") {
      check_keys({"d", "side"});
      return DistributionSpec(UniformCube{count("d", 1), number("side", 1.0)});
    }
    if (family == "gaussian") {
      check_keys({"d", "sigma"});
      return DistributionSpec(IsotropicGaussian{count("d", 1), number("sigma", 1.0)});
    }
    if (family == "exponential") {
      check_keys({"rate"});
      return DistributionSpec(Exponential{number("rate", 1.0)});
    }
    if (family == "cauchy") {
      check_keys({"scale"});
      return DistributionSpec(Cauchy{number("scale", 1.0)});
    }
    if (family == "counterexample") {
      check_keys({"clamp"});
      const std::uint64_t clamp = count("clamp", kDefaultIntervalClamp);
      if (clamp > kMaxIntervalClamp) fail("clamp must lie in [1, 1000]");
      return DistributionSpec(Counterexample{static_cast<std::uint32_t>(clamp)});
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, e.what());
  }
  return fail("unknown family '" + family + "'");
}

nlohmann::json DistributionSpec::to_json() const {
  return std::visit(overloaded{
                        [](const UniformCube& u) {
                          return nlohmann::json{{"family", "uniform_cube"}, {"d", u.d}, {"side", u.side}};
                        },
                        [](const IsotropicGaussian& g) {
                          return nlohmann::json{{"family", "gaussian"}, {"d", g.d}, {"sigma", g.sigma}};
                        },
                        [](const Exponential& e) {
                          return nlohmann::json{{"family", "exponential"}, {"rate", e.rate}};
                        },
                        [](const Cauchy& c) {
                          return nlohmann::json{{"family", "cauchy"}, {"scale", c.scale}};
                        },
                        [](const Counterexample& c) {
                          return nlohmann::json{{"family", "counterexample"}, {"clamp", c.clamp}};
                        },
                    },
                    family_);
}

Draws draw(const DistributionSpec& spec, std::size_t n, RngStream& rng) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "sample size must be >= 1");
  const std::size_t d = spec.dimension();
  std::vector<double> coords;
  if (!spec.is_counterexample()) coords.reserve(n * d);

  return std::visit(
      overloaded{
          [&](const UniformCube& u) -> Draws {
            for (std::size_t i = 0; i < n * d; ++i) coords.push_back(u.side * rng.uniform());
            return PointSample(std::move(coords), d);
          },
          [&](const IsotropicGaussian& g) -> Draws {
            for (std::size_t i = 0; i < n * d; ++i) coords.push_back(g.sigma * rng.normal());
            return PointSample(std::move(coords), d);
          },
          [&](const Exponential& e) -> Draws {
            for (std::size_t i = 0; i < n; ++i) coords.push_back(rng.exponential() / e.rate);
            return PointSample(std::move(coords), 1);
          },
          [&](const Cauchy& c) -> Draws {
            for (std::size_t i = 0; i < n; ++i) {
              // uniform() never returns 1, so the tangent stays finite.
              coords.push_back(c.scale * std::tan(std::numbers::pi * (rng.uniform() - 0.5)));
            }
            return PointSample(std::move(coords), 1);
          },
          [&](const Counterexample& ce) -> Draws {
            // P{floor(1/V) >= j} = P{V <= 1/j} = 1/j for V uniform on (0, 1].
            std::vector<LogPoint> out;
            out.reserve(n);
            for (std::size_t i = 0; i < n; ++i) {
              const double inv = std::floor(1.0 / rng.uniform_open_low());
              const auto interval =
                  inv >= static_cast<double>(ce.clamp) ? ce.clamp : static_cast<std::uint32_t>(inv);
              out.push_back({interval, rng.uniform()});
            }
            return out;
          },
      },
      spec.family());
}

Draws draw(const DistributionSpec& spec, std::size_t n, std::uint64_t seed) {
  RngStream rng(derive_stream_key(seed, 0, 0, StreamPurpose::Sample));
  return draw(spec, n, rng);
}

PointSample sample_points(const DistributionSpec& spec, std::size_t n, RngStream& rng) {
  if (spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument, "counterexample draws are LogPoints, not raw points");
  }
  return std::get<PointSample>(draw(spec, n, rng));
}

std::vector<LogPoint> sample_counterexample(const DistributionSpec& spec, std::size_t n,
                                            RngStream& rng) {
  if (!spec.is_counterexample()) {
    throw Error(ErrorCode::InvalidArgument, "spec is not the counterexample family");
  }
  return std::get<std::vector<LogPoint>>(draw(spec, n, rng));
}

double exact_entropy(const DistributionSpec& spec) {
  return std::visit(overloaded{
                        [](const UniformCube& u) { return static_cast<double>(u.d) * std::log(u.side); },
                        [](const IsotropicGaussian& g) {
                          return 0.5 * static_cast<double>(g.d) *
                                 std::log(2.0 * std::numbers::pi * std::numbers::e * g.sigma * g.sigma);
                        },
                        [](const Exponential& e) { return 1.0 - std::log(e.rate); },
                        [](const Cauchy& c) { return std::log(4.0 * std::numbers::pi * c.scale); },
                        [](const Counterexample&) { return 0.0; },
                    },
                    spec.family());
}

double cdf(const DistributionSpec& spec, double x) {
  if (spec.dimension() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: CDF requires a d = 1 family");
  }
  return std::visit(overloaded{
                        [&](const UniformCube& u) { return std::clamp(x / u.side, 0.0, 1.0); },
                        [&](const IsotropicGaussian& g) { return normal_upper(-x / g.sigma); },
                        [&](const Exponential& e) { return x <= 0.0 ? 0.0 : -std::expm1(-e.rate * x); },
                        [&](const Cauchy& c) { return 0.5 + std::atan(x / c.scale) / std::numbers::pi; },
                        [&](const Counterexample& ce) {
                          if (x < interval_start(1)) return 0.0;
                          double mass = 0.0;
                          const std::uint32_t last = std::min<std::uint32_t>(ce.clamp, 9);
                          for (std::uint32_t k = 1; k <= last; ++k) {
                            const double start = interval_start(k);
                            if (x < start) break;
                            const double frac = std::min(1.0, (x - start) / interval_width(k));
                            mass += counterexample_mass(ce, k) * frac;
                          }
                          return std::min(mass, 1.0);
                        },
                    },
                    spec.family());
}

BallMass ball_mass(const DistributionSpec& spec, std::span<const double> x, double r,
                   const BallMassOptions& options) {
  if (x.size() != spec.dimension()) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: ball centre has wrong dimension");
  }
  if (!(r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "ball radius must be >= 0");
  if (r == 0.0) return {0.0, 0.0, true};
  if (spec.dimension() == 1) return {one_dim_ball_mass(spec.family(), x[0], r), 0.0, true};

  if (const auto* g = std::get_if<IsotropicGaussian>(&spec.family())) {
    // |X - x|^2 / sigma^2 is noncentral chi-square with d degrees of freedom.
    double centre_sq = 0.0;
    for (double v : x) centre_sq += v * v;
    const double lambda = centre_sq / (g->sigma * g->sigma);
    const double q = r * r / (g->sigma * g->sigma);
    if (lambda == 0.0) {
      return {boost::math::gamma_p(static_cast<double>(g->d) / 2.0, q / 2.0), 0.0, true};
    }
    boost::math::non_central_chi_squared_distribution<double> dist(static_cast<double>(g->d), lambda);
    return {boost::math::cdf(dist, q), 0.0, true};
  }

  const auto& cube = std::get<UniformCube>(spec.family());
  if (!options.allow_monte_carlo) {
    throw Error(ErrorCode::PrecisionUnachievable,
                "PrecisionUnachievable: cube ball mass for d > 1 needs Monte Carlo, which is disabled");
  }
  BallMass out;
  out.mass = cube_ball_mass_monte_carlo(cube, x, r, options, out.standard_error);
  out.exact = out.standard_error == 0.0;
  return out;
}

double ball_mass_through(const DistributionSpec& spec, const LogPoint& center,
                         const LogPoint& boundary) {
  const auto* ce = std::get_if<Counterexample>(&spec.family());
  if (ce == nullptr) {
    throw Error(ErrorCode::InvalidArgument, "ball_mass_through needs the counterexample family");
  }
  for (const LogPoint* p : {&center, &boundary}) {
    if (p->interval < 1 || p->interval > ce->clamp || !(p->fraction >= 0.0 && p->fraction <= 1.0)) {
      throw Error(ErrorCode::InvalidArgument, "LogPoint outside the clamped interval set");
    }
  }
  const std::uint32_t j = center.interval;
  const std::uint32_t m = boundary.interval;
  if (m == j) {
    // Radius below w_j: the ball stays inside interval j.
    const double radius = std::fabs(center.fraction - boundary.fraction);
    const double covered =
        std::min(center.fraction + radius, 1.0) - std::max(center.fraction - radius, 0.0);
    return counterexample_mass(*ce, j) * covered;
  }
  if (m < j) {
    // Covers [boundary, 2c - boundary]; the far end stays below a_{j+1}.
    return counterexample_mass(*ce, m) * (1.0 - boundary.fraction) +
           counterexample_mass_range(*ce, m + 1, j);
  }
  // m > j: the far end 2c - boundary lies below a_1, so every interval
  // below m is covered.
  return counterexample_mass_range(*ce, 1, m - 1) + counterexample_mass(*ce, m) * boundary.fraction;
}

double exact_log_tail_moment(const DistributionSpec& spec) {
  using boost::math::quadrature::exp_sinh;
  return std::visit(
      overloaded{
          [](const UniformCube& u) {
            if (u.d == 1) {
              if (u.side <= 1.0) return 0.0;
              return (u.side * std::log(u.side) - u.side + 1.0) / u.side;
            }
            if (u.side * std::sqrt(static_cast<double>(u.d)) <= 1.0) return 0.0;
            // No convenient one-dimensional form: fixed-seed Monte Carlo.
            RngStream rng(derive_stream_key(0, u.d, 0, StreamPurpose::LogTailMonteCarlo));
            constexpr std::size_t kDraws = 2'000'000;
            std::vector<double> terms(kDraws);
            for (auto& t : terms) {
              double sq = 0.0;
              for (std::size_t k = 0; k < u.d; ++k) {
                const double c = u.side * rng.uniform();
                sq += c * c;
              }
              t = std::max(0.0, 0.5 * std::log(sq));
            }
            double sum = 0.0;
            for (double t : terms) sum += t;
            return sum / static_cast<double>(kDraws);
          },
          [](const IsotropicGaussian& g) {
            exp_sinh<double> integrator;
            auto f = [&](double t) {
              const double r = 1.0 + t;
              return std::log(r) * chi_radius_density(r, g.d, g.sigma);
            };
            return integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
          },
          [](const Exponential& e) {
            // int_1^inf ln x * rate e^{-rate x} dx = E_1(rate), by parts.
            return boost::math::expint(1, e.rate);
          },
          [](const Cauchy& c) {
            exp_sinh<double> integrator;
            auto f = [&](double t) {
              const double x = 1.0 + t;
              return std::log(x) * c.scale / (c.scale * c.scale + x * x);
            };
            return 2.0 / std::numbers::pi *
                   integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
          },
          [](const Counterexample&) { return std::numeric_limits<double>::infinity(); },
      },
      spec.family());
}

double clamped_counterexample_log_tail(std::uint32_t clamp) {
  if (clamp < 1 || clamp > kMaxIntervalClamp) {
    throw Error(ErrorCode::InvalidArgument, "interval clamp must lie in [1, 1000]");
  }
  const Counterexample ce{clamp};
  // E ln(a_k + w_k U) = ln a_k + E log1p(c U) with c = w_k / a_k, and
  // E log1p(c U) = ((1 + c) log1p(c) - c) / c. c underflows to 0 for k >= 10.
  std::vector<double> terms;
  terms.reserve(clamp);
  for (std::uint32_t k = 1; k <= clamp; ++k) {
    const double start = interval_start(k);
    const double c = std::isfinite(start) ? interval_width(k) / start : 0.0;
    const double correction = c > 0.0 ? ((1.0 + c) * std::log1p(c) - c) / c : 0.0;
    terms.push_back(counterexample_mass(ce, k) * (log_interval_start(k) + correction));
  }
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum;
}

}  // namespace entropykit
