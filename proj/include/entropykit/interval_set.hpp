#pragma once

#include <cstdint>

#include "entropykit/point_sample.hpp"

namespace entropykit {

// Geometry of A = U_j [a_j, a_j + w_j], a_j = 2^(2^j), w_j = 1/(j(j+1)).
// a_j overflows double from j = 10 on, so everything past that point is
// handled through ln a_j = 2^j ln 2.

inline constexpr std::uint32_t kDefaultIntervalClamp = 512;
/// Largest accepted clamp. 2^1000 ln 2 ~ 7.4e300 leaves headroom for sums.
inline constexpr std::uint32_t kMaxIntervalClamp = 1000;

double interval_width(std::uint32_t j);
/// a_j as a double; +inf for j >= 10.
double interval_start(std::uint32_t j);
double log_interval_start(std::uint32_t j);

/// A LogPoint after clamping its interval to J. The absolute offset inside
/// the original interval is kept, so clamping never lengthens any pairwise
/// distance.
struct PlacedPoint {
  std::uint32_t interval;
  double offset;  // absolute offset from a_interval, in [0, 1/2]
};

PlacedPoint place(const LogPoint& p, std::uint32_t clamp);

/// a_j + w_j * fraction in ordinary floating point. Only meaningful for
/// small j; the offset is lost to rounding once a_j is large.
double raw_coordinate(const LogPoint& p);

/// Strict ordering of placed points along the real line.
bool placed_less(const PlacedPoint& a, const PlacedPoint& b);

/// ln |x - y|; -inf when the points coincide.
double log_distance(const PlacedPoint& x, const PlacedPoint& y);

}  // namespace entropykit
