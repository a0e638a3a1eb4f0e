#include "entropykit/kdtree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "entropykit/error.hpp"

namespace entropykit {

KdTree::KdTree(const PointSample& sample, std::size_t leaf_size)
    : n_(sample.size()), d_(sample.dimension()), leaf_size_(std::max<std::size_t>(leaf_size, 1)) {
  if (n_ >= std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::InvalidArgument, "sample too large for kd-tree indexing");
  }
  std::vector<std::uint32_t> order(n_);
  std::iota(order.begin(), order.end(), 0u);
  nodes_.reserve(2 * (n_ / leaf_size_ + 1));
  if (n_ > 0) build(0, static_cast<std::uint32_t>(n_), order, sample);

  coords_.resize(n_ * d_);
  slot_of_.resize(n_);
  for (std::uint32_t s = 0; s < n_; ++s) {
    const auto p = sample.point(order[s]);
    std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(s * d_));
    slot_of_[order[s]] = s;
  }
}

std::uint32_t KdTree::build(std::uint32_t begin, std::uint32_t end,
                            std::vector<std::uint32_t>& order, const PointSample& sample) {
  const auto id = static_cast<std::uint32_t>(nodes_.size());
  nodes_.push_back({begin, end, -1, 0.0, 0, 0});
  if (end - begin <= leaf_size_) return id;

  std::size_t axis = 0;
  double widest = -1.0;
  for (std::size_t k = 0; k < d_; ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::uint32_t s = begin; s < end; ++s) {
      const double v = sample.point(order[s])[k];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > widest) {
      widest = hi - lo;
      axis = k;
    }
  }
  if (widest <= 0.0) return id;  // all points identical: keep as a leaf

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     return sample.point(a)[axis] < sample.point(b)[axis];
                   });
  const double split = sample.point(order[mid])[axis];
  const std::uint32_t left = build(begin, mid, order, sample);
  const std::uint32_t right = build(mid, end, order, sample);
  nodes_[id].axis = static_cast<std::int32_t>(axis);
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::uint32_t node_id, std::span<const double> q, std::uint32_t skip,
                    double& best) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::uint32_t s = node.begin; s < node.end; ++s) {
      if (s == skip) continue;
      const double dist = squared_distance(q, slot(s));
      if (dist < best) best = dist;
    }
    return;
  }
  // Left holds coordinates <= split, right holds coordinates >= split.
  const double diff = q[static_cast<std::size_t>(node.axis)] - node.split;
  const std::uint32_t near = diff < 0.0 ? node.left : node.right;
  const std::uint32_t far = diff < 0.0 ? node.right : node.left;
  search(near, q, skip, best);
  // Rounding is monotone, so every far-side distance computes to at least
  // diff * diff; pruning on that bound cannot change the minimum.
  if (diff * diff < best) search(far, q, skip, best);
}

double KdTree::nearest_other_squared(std::size_t query) const {
  const std::uint32_t s = slot_of_[query];
  double best = std::numeric_limits<double>::infinity();
  search(0, slot(s), s, best);
  return best;
}

}  // namespace entropykit
