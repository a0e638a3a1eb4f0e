#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "entropykit/interval_set.hpp"
#include "entropykit/point_sample.hpp"
#include "entropykit/rng.hpp"

namespace entropykit {

/// Uniform on the cube [0, side]^d.
struct UniformCube {
  std::size_t d = 1;
  double side = 1.0;
};

/// N(0, sigma^2 I_d).
struct IsotropicGaussian {
  std::size_t d = 1;
  double sigma = 1.0;
};

struct Exponential {
  double rate = 1.0;
};

/// Centred Cauchy. Unbounded with E|X| infinite but E(ln|X|)^+ finite.
struct Cauchy {
  double scale = 1.0;
};

/// Uniform on A = U_j [a_j, a_j + w_j] (a_j = 2^(2^j), w_j = 1/(j(j+1))),
/// with the tail mass P{Y >= clamp} = 1/clamp put on interval `clamp`.
/// Its true entropy is 0 while E(ln|X|)^+ is infinite.
struct Counterexample {
  std::uint32_t clamp = kDefaultIntervalClamp;
};

/// Immutable description of an oracle distribution.
class DistributionSpec {
 public:
  using Family = std::variant<UniformCube, IsotropicGaussian, Exponential, Cauchy, Counterexample>;

  /// Throws InvalidArgument when a parameter is out of range.
  explicit DistributionSpec(Family family);

  const Family& family() const noexcept { return family_; }
  std::size_t dimension() const noexcept;
  bool is_counterexample() const noexcept {
    return std::holds_alternative<Counterexample>(family_);
  }
  /// Short identifier such as "gaussian(d=1,sigma=1)".
  std::string name() const;

  /// {"family": "uniform_cube", "d": 1, "side": 1}, etc. Unknown keys are
  /// rejected with ParseError.
  static DistributionSpec from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  Family family_;
};

/// Raw points for ordinary families; interval draws for the counterexample.
using Draws = std::variant<PointSample, std::vector<LogPoint>>;

/// n iid draws from the stream. Counterexample specs return LogPoints.
Draws draw(const DistributionSpec& spec, std::size_t n, RngStream& rng);
/// Same, with the stream derived from (seed, 0, 0, Sample).
Draws draw(const DistributionSpec& spec, std::size_t n, std::uint64_t seed);

/// Convenience wrappers that throw InvalidArgument on the wrong family kind.
PointSample sample_points(const DistributionSpec& spec, std::size_t n, RngStream& rng);
std::vector<LogPoint> sample_counterexample(const DistributionSpec& spec, std::size_t n,
                                            RngStream& rng);

/// Closed-form differential entropy in nats.
double exact_entropy(const DistributionSpec& spec);

/// CDF of a one-dimensional family (DimensionMismatch when d > 1).
double cdf(const DistributionSpec& spec, double x);

struct BallMassOptions {
  double target_standard_error = 1e-3;
  std::size_t budget = 1'000'000;
  std::uint64_t seed = 0;
  bool allow_monte_carlo = true;
};

struct BallMass {
  double mass = 0.0;
  double standard_error = 0.0;
  bool exact = true;
};

/// mu(B(x, r)) for the closed ball. Exact for every d = 1 family and for
/// the isotropic Gaussian in any dimension; a Monte Carlo estimate for cubes
/// with d > 1, which throws PrecisionUnachievable when the budget cannot
/// reach the target standard error.
BallMass ball_mass(const DistributionSpec& spec, std::span<const double> x, double r,
                   const BallMassOptions& options = {});

/// mu(B(c, |c - b|)) for two points of the counterexample set, evaluated
/// from the interval structure; neither point is ever expanded to a double.
double ball_mass_through(const DistributionSpec& spec, const LogPoint& center,
                         const LogPoint& boundary);

/// E[(ln |X|)^+]; +inf for the (unclamped) counterexample.
double exact_log_tail_moment(const DistributionSpec& spec);

/// E[(ln |X|)^+] of the clamped counterexample sampler: finite, of order
/// 2^clamp ln 2 / clamp.
double clamped_counterexample_log_tail(std::uint32_t clamp);

}  // namespace entropykit
