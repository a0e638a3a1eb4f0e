#include <cmath>
#include <numbers>
#include <numeric>

#include "doctest.h"
#include "oracles.hpp"

#include "entropykit/error.hpp"
#include "entropykit/estimators.hpp"

using namespace entropykit;

namespace {

// Direct transcription of the estimator on top of the brute-force oracle.
double oracle_entropy(const PointSample& s) {
  const auto r = oracle::brute_nn(s);
  const double n = static_cast<double>(s.size());
  const double d = static_cast<double>(s.dimension());
  const double log_v = d / 2 * std::log(std::numbers::pi) - std::lgamma(d / 2 + 1);
  double acc = 0.0;
  for (double ri : r) acc += std::log(n - 1) + d * std::log(ri) + log_v;
  return acc / n + 0.5772156649015329;
}

PointSample shuffle(const PointSample& s, oracle::TestRng& rng) {
  std::vector<std::size_t> perm(s.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
  std::vector<double> c;
  for (std::size_t i : perm) c.insert(c.end(), s.point(i).begin(), s.point(i).end());
  return PointSample(std::move(c), s.dimension());
}

}  // namespace

TEST_CASE("hand-computed estimates") {
  for (Backend b : {Backend::Brute, Backend::Index}) {
    CHECK(std::fabs(kl_entropy(PointSample::from_scalars({0, 1}), b).value - 1.2703628454614782) <
          1e-12);
    CHECK(std::fabs(kl_entropy(PointSample::from_scalars({0, 1, 3}), b).value -
                    2.1945590862080719) < 1e-12);
  }
}

TEST_CASE("unit ball volumes") {
  CHECK(unit_ball_volume(1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(unit_ball_volume(2) == doctest::Approx(std::numbers::pi).epsilon(1e-15));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.1887902047863910).epsilon(1e-15));
  for (std::size_t d = 3; d < 60; ++d) {
    const double ratio = 2 * std::numbers::pi / static_cast<double>(d);
    CHECK(unit_ball_volume(d) == doctest::Approx(ratio * unit_ball_volume(d - 2)).epsilon(1e-12));
  }
  for (std::size_t d : {1u, 7u, 100u, 400u}) {
    CHECK(log_unit_ball_volume(d) ==
          doctest::Approx(d / 2.0 * std::log(std::numbers::pi) -
                          std::lgamma(d / 2.0 + 1))
              .epsilon(1e-12));
  }
}

TEST_CASE("estimate matches an independent transcription") {
  oracle::TestRng rng(23);
  for (std::size_t d : {1u, 2u, 3u, 5u}) {
    const PointSample s = oracle::gaussian_sample(rng, 700, d);
    const double expected = oracle_entropy(s);
    for (Backend b : {Backend::Brute, Backend::Index}) {
      CHECK(kl_entropy(s, b).value == doctest::Approx(expected).epsilon(1e-12));
    }
  }
}

TEST_CASE("estimate metadata") {
  const auto e = kl_entropy(PointSample::from_scalars({0, 1, 3}), Backend::Brute);
  CHECK(e.n == 3);
  CHECK(e.d == 1);
  CHECK(e.backend == Backend::Brute);
  CHECK(e.euler_mascheroni == 0.5772156649015329);
  CHECK_FALSE(e.log_domain);
  CHECK_FALSE(e.clamp.has_value());

  const std::vector<LogPoint> pts{{1, 0.0}, {2, 0.0}};
  const auto l = kl_entropy_logdomain(pts, 300);
  CHECK(l.log_domain);
  CHECK(l.clamp == 300u);
  CHECK_FALSE(l.backend.has_value());
}

TEST_CASE("permutation invariance is exact") {
  oracle::TestRng rng(29);
  for (std::size_t d : {1u, 3u}) {
    const PointSample s = oracle::uniform_sample(rng, 900, d);
    const double base = kl_entropy(s).value;
    for (int k = 0; k < 5; ++k) CHECK(kl_entropy(shuffle(s, rng)).value == base);
  }
}

TEST_CASE("translation invariance is exact for exact shifts") {
  oracle::TestRng rng(31);
  const PointSample s = oracle::dyadic_sample(rng, 500, 2);
  const std::vector<double> shift{-7.0, 1024.0};
  CHECK(kl_entropy(s.translated(shift)).value == kl_entropy(s).value);
}

TEST_CASE("scaling shifts the estimate by d ln c") {
  oracle::TestRng rng(37);
  for (std::size_t d : {1u, 2u, 4u}) {
    const PointSample s = oracle::gaussian_sample(rng, 600, d);
    const double base = kl_entropy(s).value;
    for (double c : {0.01, 2.0, 50.0}) {
      CHECK(std::fabs(kl_entropy(s.scaled(c)).value - base - d * std::log(c)) < 1e-10);
    }
  }
}

TEST_CASE("thread count does not change the estimate") {
  oracle::TestRng rng(41);
  const PointSample s = oracle::gaussian_sample(rng, 4000, 3);
  const double one = kl_entropy(s, Backend::Index, 1).value;
  CHECK(kl_entropy(s, Backend::Index, 4).value == one);
  CHECK(kl_entropy(s, Backend::Brute, 2).value == one);
}

TEST_CASE("estimate equals minus the mean log of the 1-NN density") {
  const auto f = one_nn_density(PointSample::from_scalars({0, 1}));
  for (double v : f) CHECK(v == doctest::Approx(0.28072974178344258).epsilon(1e-14));

  oracle::TestRng rng(43);
  for (int trial = 0; trial < 20; ++trial) {
    const PointSample s = oracle::uniform_sample(rng, 50 + rng.below(400), 1 + rng.below(3));
    const auto dens = one_nn_density(s);
    double acc = 0.0;
    for (double v : dens) acc += std::log(v);
    CHECK(std::fabs(kl_entropy(s).value + acc / static_cast<double>(dens.size())) < 1e-10);
  }
}

TEST_CASE("ell statistic relation") {
  oracle::TestRng rng(47);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + rng.below(800);
    const PointSample s = oracle::gaussian_sample(rng, n, 1);
    const auto r = oracle::brute_nn(s);
    double ell = 0.0;
    for (double ri : r) ell += std::log2(1.0 / (static_cast<double>(n) * ri));
    ell /= static_cast<double>(n);
    CHECK(ell_statistic(s) == doctest::Approx(ell).epsilon(1e-12));
    const double nd = static_cast<double>(n);
    const double rhs = -std::log(2.0) * ell + std::log(2 * (nd - 1) / nd) + kEulerMascheroni;
    CHECK(std::fabs(kl_entropy(s).value - rhs) < 1e-10);
  }
  CHECK_THROWS_AS(ell_statistic(PointSample({0, 0, 1, 1}, 2)), Error);
  try {
    ell_statistic(PointSample({0, 0, 1, 1}, 2));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DimensionMismatch);
  }
}

TEST_CASE("log-domain hand examples") {
  const std::vector<LogPoint> near{{1, 0.0}, {1, 0.5}};
  CHECK(std::fabs(kl_entropy_logdomain(near).value - -0.11593151565841245) < 1e-12);
  const std::vector<LogPoint> apart{{1, 0.0}, {2, 0.0}};
  CHECK(std::fabs(kl_entropy_logdomain(apart).value - 3.7552694952494785) < 1e-12);
}

TEST_CASE("log-domain estimate agrees with the raw path for small intervals") {
  oracle::TestRng rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const std::vector<LogPoint> pts = oracle::separated_logpoints(rng);
    std::vector<double> raw;
    for (const auto& p : pts) raw.push_back(raw_coordinate(p));
    const double direct = kl_entropy(PointSample::from_scalars(raw), Backend::Brute).value;
    CHECK(std::fabs(kl_entropy_logdomain(pts).value - direct) < 1e-9);

    double ell_direct = ell_statistic(PointSample::from_scalars(raw), Backend::Brute);
    CHECK(std::fabs(ell_statistic(pts) - ell_direct) < 1e-9);
  }
}

TEST_CASE("log-domain estimate is monotone in the clamp") {
  oracle::TestRng rng(59);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<LogPoint> pts;
    for (int k = 0; k < 500; ++k) {
      const double v = rng.uniform() + 1e-300;
      pts.push_back({static_cast<std::uint32_t>(std::min(1000.0, std::floor(1.0 / v))),
                     rng.uniform()});
    }
    double prev = kl_entropy_logdomain(pts, 1000).value;
    CHECK(std::isfinite(prev));
    for (std::uint32_t clamp : {900u, 512u, 128u, 16u, 2u}) {
      const double now = kl_entropy_logdomain(pts, clamp).value;
      CHECK(now <= prev);
      prev = now;
    }
  }
}

TEST_CASE("estimator rejects bad input") {
  CHECK_THROWS_AS(kl_entropy(PointSample::from_scalars({1.0})), Error);
  CHECK_THROWS_AS(kl_entropy(PointSample::from_scalars({1.0, 2.0, 1.0})), DuplicatePointsError);
  CHECK_THROWS_AS(kl_entropy_logdomain(std::vector<LogPoint>{{1, 0.5}}), Error);
  CHECK_THROWS_AS(kl_entropy_logdomain(std::vector<LogPoint>{{1, 0.5}, {2, 0.5}}, 0), Error);
  CHECK_THROWS_AS(kl_entropy_logdomain(std::vector<LogPoint>{{1, 0.5}, {2, 1.5}}), Error);
  CHECK_THROWS_AS(PointSample({1.0, 2.0, 3.0}, 2), Error);
  CHECK_THROWS_AS(PointSample({1.0, NAN}, 1), Error);
}
