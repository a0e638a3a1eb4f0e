#include "entropykit/interval_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "entropykit/error.hpp"

namespace entropykit {
namespace {

// Below this interval index a_j (and differences of a_j) fit in a double.
constexpr std::uint32_t kDirectLimit = 9;

}  // namespace

double interval_width(std::uint32_t j) {
  const double jd = static_cast<double>(j);
  return 1.0 / (jd * (jd + 1.0));
}

double interval_start(std::uint32_t j) {
  if (j > kDirectLimit) return std::numeric_limits<double>::infinity();
  return std::ldexp(1.0, 1 << j);
}

double log_interval_start(std::uint32_t j) {
  return std::ldexp(1.0, static_cast<int>(j)) * std::numbers::ln2;
}

PlacedPoint place(const LogPoint& p, std::uint32_t clamp) {
  if (p.interval < 1) {
    throw Error(ErrorCode::InvalidArgument, "LogPoint interval index must be >= 1");
  }
  if (!(p.fraction >= 0.0 && p.fraction <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "LogPoint fraction must lie in [0, 1]");
  }
  if (clamp < 1 || clamp > kMaxIntervalClamp) {
    throw Error(ErrorCode::InvalidArgument, "interval clamp must lie in [1, 1000]");
  }
  return {std::min(p.interval, clamp), interval_width(p.interval) * p.fraction};
}

double raw_coordinate(const LogPoint& p) {
  return interval_start(p.interval) + interval_width(p.interval) * p.fraction;
}

bool placed_less(const PlacedPoint& a, const PlacedPoint& b) {
  if (a.interval != b.interval) return a.interval < b.interval;
  return a.offset < b.offset;
}

double log_distance(const PlacedPoint& x, const PlacedPoint& y) {
  if (x.interval == y.interval) {
    return std::log(std::fabs(x.offset - y.offset));
  }
  const PlacedPoint& lo = x.interval < y.interval ? x : y;
  const PlacedPoint& hi = x.interval < y.interval ? y : x;
  const double offset_gap = hi.offset - lo.offset;
  if (hi.interval <= kDirectLimit) {
    const double gap = (interval_start(hi.interval) - interval_start(lo.interval)) + offset_gap;
    return std::log(gap);
  }
  // ln(a_hi - a_lo + gap) = ln a_hi + log1p(-a_lo/a_hi + gap/a_hi); both
  // ratios are below 2^-512 here and may underflow to zero.
  const double exponent_gap =
      std::ldexp(1.0, static_cast<int>(hi.interval)) - std::ldexp(1.0, static_cast<int>(lo.interval));
  const double ratio = exponent_gap > 1100.0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(exponent_gap));
  const double hi_exponent = std::ldexp(1.0, static_cast<int>(hi.interval));
  const double inv_start = hi_exponent > 1100.0 ? 0.0 : std::ldexp(1.0, -static_cast<int>(hi_exponent));
  return log_interval_start(hi.interval) + std::log1p(-ratio + offset_gap * inv_start);
}

}  // namespace entropykit
