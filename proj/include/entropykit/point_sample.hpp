#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace entropykit {

/// n points in R^d, stored row-major. Every coordinate is finite.
class PointSample {
 public:
  PointSample() = default;

  /// Throws InvalidDimension for d == 0, InvalidArgument when the buffer
  /// length is not a multiple of d or a coordinate is not finite.
  PointSample(std::vector<double> coordinates, std::size_t dimension);

  static PointSample from_scalars(std::vector<double> values) {
    return PointSample(std::move(values), 1);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t dimension() const noexcept { return d_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * d_, d_};
  }
  std::span<const double> coordinates() const noexcept { return coords_; }

  PointSample translated(std::span<const double> shift) const;
  PointSample scaled(double factor) const;

 private:
  std::vector<double> coords_;
  std::size_t n_ = 0;
  std::size_t d_ = 1;
};

/// A point of the union-of-intervals set A = U_j [a_j, a_j + w_j] with
/// a_j = 2^(2^j) and w_j = 1/(j(j+1)), stored as (interval, fraction) so the
/// coordinate a_j + w_j * fraction never has to be formed.
struct LogPoint {
  std::uint32_t interval = 1;
  double fraction = 0.0;  // in [0, 1]

  friend bool operator==(const LogPoint&, const LogPoint&) = default;
};

}  // namespace entropykit
