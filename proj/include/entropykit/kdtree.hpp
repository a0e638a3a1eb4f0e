#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "entropykit/point_sample.hpp"

namespace entropykit {

/// Squared Euclidean distance, summed in coordinate order. Both search
/// backends go through this one function so their results agree bit for bit.
inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc += diff * diff;
  }
  return acc;
}

/// Exact kd-tree over a PointSample (median split on the widest axis).
/// The tree keeps its own reordered copy of the coordinates.
class KdTree {
 public:
  explicit KdTree(const PointSample& sample, std::size_t leaf_size = 12);

  /// Smallest squared distance from point `query` to any other point.
  double nearest_other_squared(std::size_t query) const;

  std::size_t size() const noexcept { return n_; }

 private:
  struct Node {
    std::uint32_t begin;
    std::uint32_t end;
    std::int32_t axis;  // -1 marks a leaf
    double split;
    std::uint32_t left;
    std::uint32_t right;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<std::uint32_t>& order,
                      const PointSample& sample);
  void search(std::uint32_t node, std::span<const double> q, std::uint32_t skip,
              double& best) const;

  std::span<const double> slot(std::uint32_t s) const noexcept {
    return {coords_.data() + static_cast<std::size_t>(s) * d_, d_};
  }

  std::size_t n_;
  std::size_t d_;
  std::size_t leaf_size_;
  std::vector<Node> nodes_;
  std::vector<double> coords_;             // points in tree order
  std::vector<std::uint32_t> slot_of_;     // original index -> tree slot
};

}  // namespace entropykit
