#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"

#include "entropykit/distributions.hpp"
#include "entropykit/error.hpp"
#include "entropykit/ks.hpp"

using namespace entropykit;

namespace {

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }
double big_phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Gaussian disc mass via t = r sin(theta), which removes the endpoint singularity.
double gaussian_disc_mass(double x1, double x2, double r) {
  auto f = [&](double th) {
    const double h = r * std::cos(th);
    return phi(x1 + r * std::sin(th)) * (big_phi(x2 + h) - big_phi(x2 - h)) * h;
  };
  return oracle::simpson(f, -std::numbers::pi / 2, std::numbers::pi / 2, 4000);
}

// Counterexample mass of [lo, hi] by direct overlap with each interval; only
// valid while every relevant interval start fits in a double.
double counterexample_interval_mass(double lo, double hi, std::uint32_t clamp) {
  double mass = 0.0;
  for (std::uint32_t j = 1; j <= std::min(clamp, 9u); ++j) {
    const double a = std::ldexp(1.0, 1 << j);
    const double w = 1.0 / (j * (j + 1.0));
    const double overlap = std::max(0.0, std::min(hi, a + w) - std::max(lo, a));
    mass += overlap * (j == clamp ? clamp + 1.0 : 1.0);
  }
  return mass;
}

double spec_entropy(const DistributionSpec::Family& f) { return exact_entropy(DistributionSpec(f)); }

}  // namespace

TEST_CASE("closed-form entropies") {
  CHECK(spec_entropy(UniformCube{3, 2.0}) == doctest::Approx(3 * std::log(2.0)).epsilon(1e-15));
  CHECK(spec_entropy(IsotropicGaussian{1, 1.0}) ==
        doctest::Approx(1.4189385332046727).epsilon(1e-15));
  CHECK(spec_entropy(IsotropicGaussian{4, 0.5}) ==
        doctest::Approx(4 * (1.4189385332046727 + std::log(0.5))).epsilon(1e-14));
  CHECK(spec_entropy(Exponential{2.0}) == doctest::Approx(1 - std::log(2.0)).epsilon(1e-15));
  CHECK(spec_entropy(Cauchy{1.0}) == doctest::Approx(2.5310242469692908).epsilon(1e-15));
  CHECK(spec_entropy(Counterexample{}) == 0.0);
}

TEST_CASE("closed-form entropies match numerical integration of -f ln f") {
  auto neg_f_log_f = [](auto density) {
    return [density](double x) {
      const double f = density(x);
      return f > 0 ? -f * std::log(f) : 0.0;
    };
  };
  const double gauss = oracle::simpson(neg_f_log_f([](double x) { return phi(x / 1.5) / 1.5; }),
                                       -40, 40, 20000);
  CHECK(gauss == doctest::Approx(spec_entropy(IsotropicGaussian{1, 1.5})).epsilon(1e-10));
  const double expo = oracle::simpson(
      neg_f_log_f([](double x) { return 3 * std::exp(-3 * x); }), 0, 30, 20000);
  CHECK(expo == doctest::Approx(spec_entropy(Exponential{3.0})).epsilon(1e-10));
  // Cauchy: x = tan(t) then t = pi/2 - s^2 tames the logarithmic endpoint.
  auto cauchy = [](double s) {
    const double x = std::tan(std::numbers::pi / 2 - s * s);
    const double f = 1 / (std::numbers::pi * (1 + x * x));
    return s == 0 ? 0.0 : -f * std::log(f) * (1 + x * x) * 2 * s;
  };
  CHECK(2 * oracle::simpson(cauchy, 0, std::sqrt(std::numbers::pi / 2), 20000) ==
        doctest::Approx(spec_entropy(Cauchy{1.0})).epsilon(1e-8));
}

TEST_CASE("spec validation and JSON round trip") {
  CHECK_THROWS_AS(DistributionSpec(UniformCube{0, 1.0}), Error);
  CHECK_THROWS_AS(DistributionSpec(IsotropicGaussian{1, -1.0}), Error);
  CHECK_THROWS_AS(DistributionSpec(Exponential{0.0}), Error);
  CHECK_THROWS_AS(DistributionSpec(Counterexample{1001}), Error);

  const auto spec = DistributionSpec::from_json(nlohmann::json::parse(R"({"family":"gaussian","d":3,"sigma":2})"));
  CHECK(spec.dimension() == 3);
  CHECK(DistributionSpec::from_json(spec.to_json()).to_json() == spec.to_json());
  const auto ce = DistributionSpec::from_json(nlohmann::json::parse(R"({"family":"counterexample"})"));
  CHECK(ce.is_counterexample());
  CHECK(std::get<Counterexample>(ce.family()).clamp == 512);

  for (const char* bad : {R"({"family":"gaussian","mu":1})", R"({"family":"beta"})", R"({"d":1})",
                          R"({"family":"uniform_cube","d":-2})"}) {
    CAPTURE(bad);
    try {
      DistributionSpec::from_json(nlohmann::json::parse(bad));
      FAIL("expected ParseError");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::ParseError);
    }
  }
}

TEST_CASE("draws are deterministic in the seed") {
  const DistributionSpec spec(IsotropicGaussian{2, 1.0});
  const auto a = std::get<PointSample>(draw(spec, 100, 42));
  const auto b = std::get<PointSample>(draw(spec, 100, 42));
  const auto c = std::get<PointSample>(draw(spec, 100, 43));
  CHECK(std::ranges::equal(a.coordinates(), b.coordinates()));
  CHECK_FALSE(std::ranges::equal(a.coordinates(), c.coordinates()));

  const DistributionSpec ce(Counterexample{});
  CHECK(std::get<std::vector<LogPoint>>(draw(ce, 50, 7)) ==
        std::get<std::vector<LogPoint>>(draw(ce, 50, 7)));
}

TEST_CASE("d = 1 samplers pass a KS test against their CDF") {
  const std::size_t n = 20000;
  const double threshold = ks_one_sample_threshold(n, 0.01);
  for (const DistributionSpec::Family& f :
       {DistributionSpec::Family{UniformCube{1, 2.0}}, DistributionSpec::Family{IsotropicGaussian{1, 0.7}},
        DistributionSpec::Family{Exponential{1.5}}, DistributionSpec::Family{Cauchy{2.0}}}) {
    const DistributionSpec spec(f);
    CAPTURE(spec.name());
    const auto s = std::get<PointSample>(draw(spec, n, 2024));
    std::vector<double> x(s.coordinates().begin(), s.coordinates().end());
    CHECK(ks_statistic(x, [&](double v) { return cdf(spec, v); }) < threshold);
  }
}

TEST_CASE("multivariate samplers have the right marginals") {
  const std::size_t n = 10000;
  const double threshold = ks_one_sample_threshold(n, 0.01);
  const DistributionSpec gauss(IsotropicGaussian{3, 2.0});
  const DistributionSpec marginal(IsotropicGaussian{1, 2.0});
  const auto g = std::get<PointSample>(draw(gauss, n, 5));
  const DistributionSpec cube(UniformCube{2, 3.0});
  const DistributionSpec cube_marginal(UniformCube{1, 3.0});
  const auto u = std::get<PointSample>(draw(cube, n, 6));
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<double> col;
    for (std::size_t i = 0; i < n; ++i) col.push_back(g.point(i)[k]);
    CHECK(ks_statistic(col, [&](double v) { return cdf(marginal, v); }) < threshold);
  }
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> col;
    for (std::size_t i = 0; i < n; ++i) col.push_back(u.point(i)[k]);
    CHECK(ks_statistic(col, [&](double v) { return cdf(cube_marginal, v); }) < threshold);
  }
}

TEST_CASE("counterexample sampler: interval frequencies and fractions") {
  const std::uint32_t clamp = 20;
  const std::size_t n = 200000;
  const DistributionSpec spec(Counterexample{clamp});
  const auto pts = std::get<std::vector<LogPoint>>(draw(spec, n, 99));
  std::map<std::uint32_t, std::size_t> counts;
  std::vector<double> fractions;
  for (const auto& p : pts) {
    REQUIRE(p.interval >= 1);
    REQUIRE(p.interval <= clamp);
    ++counts[p.interval];
    fractions.push_back(p.fraction);
  }
  for (std::uint32_t j = 1; j <= clamp; ++j) {
    const double p = j < clamp ? 1.0 / (j * (j + 1.0)) : 1.0 / clamp;
    const double expected = p * static_cast<double>(n);
    const double z = (static_cast<double>(counts[j]) - expected) / std::sqrt(expected * (1 - p));
    CAPTURE(j);
    CHECK(std::fabs(z) < 5.0);
  }
  CHECK(ks_statistic_uniform(fractions) < ks_one_sample_threshold(n, 0.01));
}

TEST_CASE("d = 1 ball masses") {
  const auto mass = [](const DistributionSpec::Family& f, double x, double r) {
    const double c[] = {x};
    return ball_mass(DistributionSpec(f), c, r).mass;
  };
  CHECK(mass(UniformCube{1, 1.0}, 0.5, 0.2) == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(mass(UniformCube{1, 2.0}, 1.9, 0.5) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(mass(UniformCube{1, 1.0}, 0.5, 5.0) == 1.0);
  CHECK(std::fabs(mass(IsotropicGaussian{1, 1.0}, 0.0, 1.959964) - 0.95000000180711519) < 1e-14);
  CHECK(mass(Exponential{1.0}, 1.0, 0.5) ==
        doctest::Approx(std::exp(-0.5) - std::exp(-1.5)).epsilon(1e-14));
  CHECK(mass(Exponential{1.0}, 0.2, 1.0) == doctest::Approx(1 - std::exp(-1.2)).epsilon(1e-14));
  CHECK(mass(Cauchy{2.0}, 3.0, 0.25) ==
        doctest::Approx((std::atan(3.25 / 2) - std::atan(2.75 / 2)) / std::numbers::pi).epsilon(1e-13));

  // Tiny radii: mass ~ 2 r f(x), where naive CDF differences lose everything.
  for (const DistributionSpec::Family& f :
       {DistributionSpec::Family{IsotropicGaussian{1, 1.0}}, DistributionSpec::Family{Exponential{1.0}},
        DistributionSpec::Family{Cauchy{1.0}}}) {
    const double x = 1.3;
    const double density = std::visit(
        [&](const auto& fam) -> double {
          using T = std::decay_t<decltype(fam)>;
          if constexpr (std::is_same_v<T, IsotropicGaussian>) return phi(x);
          if constexpr (std::is_same_v<T, Exponential>) return std::exp(-x);
          if constexpr (std::is_same_v<T, Cauchy>) return 1 / (std::numbers::pi * (1 + x * x));
          return 0.0;
        },
        f);
    CHECK(mass(f, x, 1e-12) == doctest::Approx(2e-12 * density).epsilon(1e-9));
  }
}

TEST_CASE("d = 1 ball masses agree with numerically integrated densities") {
  oracle::TestRng rng(61);
  for (int k = 0; k < 50; ++k) {
    const double x = rng.uniform() * 6 - 3;
    const double r = rng.uniform() * 2;
    const double c[] = {x};
    const double g = oracle::simpson([](double t) { return phi(t); }, x - r, x + r, 2000);
    CHECK(ball_mass(DistributionSpec(IsotropicGaussian{1, 1.0}), c, r).mass ==
          doctest::Approx(g).epsilon(1e-10));
    const double lo = std::max(0.0, x - r);
    const double e = x + r > 0 ? oracle::simpson([](double t) { return 2 * std::exp(-2 * t); },
                                                 lo, x + r, 2000)
                               : 0.0;
    CHECK(ball_mass(DistributionSpec(Exponential{2.0}), c, r).mass ==
          doctest::Approx(e).epsilon(1e-10));
  }
}

TEST_CASE("Gaussian ball masses in higher dimension") {
  const DistributionSpec g2(IsotropicGaussian{2, 1.0});
  oracle::TestRng rng(67);
  for (int k = 0; k < 20; ++k) {
    const double c[] = {rng.uniform() * 4 - 2, rng.uniform() * 4 - 2};
    const double r = 0.05 + rng.uniform() * 2;
    const auto m = ball_mass(g2, c, r);
    CHECK(m.exact);
    CHECK(m.mass == doctest::Approx(gaussian_disc_mass(c[0], c[1], r)).epsilon(1e-8));
  }
  const double origin2[] = {0.0, 0.0};
  CHECK(ball_mass(g2, origin2, 1.3).mass == doctest::Approx(1 - std::exp(-1.3 * 1.3 / 2)).epsilon(1e-13));

  const DistributionSpec g3(IsotropicGaussian{3, 2.0});
  const double origin3[] = {0.0, 0.0, 0.0};
  const double r = 2.5;
  const double s = r / 2.0;
  const double chi3 = std::erf(s / std::numbers::sqrt2) - std::sqrt(2 / std::numbers::pi) * s * std::exp(-s * s / 2);
  CHECK(ball_mass(g3, origin3, r).mass == doctest::Approx(chi3).epsilon(1e-13));
}

TEST_CASE("uniform cube ball mass in d > 1 uses Monte Carlo") {
  const DistributionSpec cube(UniformCube{2, 1.0});
  const double c[] = {0.5, 0.5};
  const auto m = ball_mass(cube, c, 0.3);
  CHECK_FALSE(m.exact);
  CHECK(m.standard_error <= 1e-3);
  CHECK(std::fabs(m.mass - std::numbers::pi * 0.09) < 5 * m.standard_error);

  BallMassOptions strict;
  strict.allow_monte_carlo = false;
  try {
    ball_mass(cube, c, 0.3, strict);
    FAIL("expected PrecisionUnachievable");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::PrecisionUnachievable);
  }
  BallMassOptions starved;
  starved.target_standard_error = 1e-6;
  starved.budget = 1000;
  CHECK_THROWS_AS(ball_mass(cube, c, 0.3, starved), Error);
}

TEST_CASE("ball mass argument checks") {
  const DistributionSpec g2(IsotropicGaussian{2, 1.0});
  const double c1[] = {0.0};
  try {
    ball_mass(g2, c1, 1.0);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
  const double c2[] = {0.0, 0.0};
  CHECK_THROWS_AS(ball_mass(g2, c2, -1.0), Error);
  CHECK_THROWS_AS(cdf(g2, 0.0), Error);
}

TEST_CASE("counterexample ball mass matches direct interval overlap") {
  oracle::TestRng rng(71);
  // Interval starts up to a_4 = 65536 keep the raw arithmetic accurate to ~1e-11.
  for (std::uint32_t clamp : {3u, 4u, 512u}) {
    const DistributionSpec spec(Counterexample{clamp});
    const std::uint32_t top = std::min(clamp, 4u);
    for (int k = 0; k < 300; ++k) {
      const LogPoint centre{static_cast<std::uint32_t>(1 + rng.below(top)), rng.uniform()};
      const LogPoint boundary{static_cast<std::uint32_t>(1 + rng.below(top)), rng.uniform()};
      if (centre == boundary) continue;
      const double x = raw_coordinate(centre);
      const double r = std::fabs(raw_coordinate(boundary) - x);
      CAPTURE(k);
      CHECK(ball_mass_through(spec, centre, boundary) ==
            doctest::Approx(counterexample_interval_mass(x - r, x + r, clamp)).epsilon(1e-9));
    }
  }
}

TEST_CASE("counterexample ball masses: boundary cases") {
  const DistributionSpec spec(Counterexample{512});
  CHECK(ball_mass_through(spec, {1, 0.5}, {1, 0.75}) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(ball_mass_through(spec, {1, 0.0}, {512, 1.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_mass_through(spec, {512, 0.5}, {1, 0.0}) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ball_mass_through(spec, {3, 0.25}, {3, 0.25}) == 0.0);
  CHECK_THROWS_AS(ball_mass_through(DistributionSpec(Cauchy{}), {1, 0.0}, {2, 0.0}), Error);
}

TEST_CASE("log-tail moments") {
  CHECK(exact_log_tail_moment(DistributionSpec(Exponential{1.0})) ==
        doctest::Approx(0.21938393439552027).epsilon(1e-13));
  CHECK(exact_log_tail_moment(DistributionSpec(Cauchy{1.0})) ==
        doctest::Approx(0.58312180806163756).epsilon(1e-10));
  CHECK(exact_log_tail_moment(DistributionSpec(IsotropicGaussian{1, 1.0})) ==
        doctest::Approx(0.12205043635709779).epsilon(1e-10));
  CHECK(exact_log_tail_moment(DistributionSpec(UniformCube{1, 1.0})) == 0.0);
  CHECK(exact_log_tail_moment(DistributionSpec(UniformCube{1, std::exp(1.0)})) ==
        doctest::Approx(1.0 / std::exp(1.0)).epsilon(1e-14));
  CHECK(std::isinf(exact_log_tail_moment(DistributionSpec(Counterexample{}))));

  // Gaussian in d = 2: E ln+ |X| from the Rayleigh density by quadrature.
  const double rayleigh = oracle::simpson(
      [](double r) { return std::log(r) * r * std::exp(-r * r / 2); }, 1, 40, 20000);
  CHECK(exact_log_tail_moment(DistributionSpec(IsotropicGaussian{2, 1.0})) ==
        doctest::Approx(rayleigh).epsilon(1e-9));
}

TEST_CASE("clamped counterexample log tail") {
  // Independent evaluation: mass_k * E ln(a_k + w_k U), with the expectation
  // integrated numerically while a_k fits in a double.
  const std::uint32_t clamp = 12;
  double expected = 0.0;
  for (std::uint32_t k = 1; k <= clamp; ++k) {
    const double mass = k < clamp ? 1.0 / (k * (k + 1.0)) : 1.0 / clamp;
    double e = std::ldexp(1.0, static_cast<int>(k)) * std::numbers::ln2;
    if (k <= 5) {
      const double a = std::ldexp(1.0, 1 << k);
      const double w = 1.0 / (k * (k + 1.0));
      e = oracle::simpson([&](double u) { return std::log(a + w * u); }, 0, 1, 200);
    }
    expected += mass * e;
  }
  CHECK(clamped_counterexample_log_tail(clamp) == doctest::Approx(expected).epsilon(1e-12));

  double prev = 0.0;
  for (std::uint32_t c : {1u, 2u, 10u, 100u, 512u, 1000u}) {
    const double v = clamped_counterexample_log_tail(c);
    CHECK(std::isfinite(v));
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(clamped_counterexample_log_tail(0), Error);
}
