#include "entropykit/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "entropykit/error.hpp"
#include "entropykit/kdtree.hpp"
#include "entropykit/parallel.hpp"

namespace entropykit {
namespace {

void require_pairs(std::size_t n) {
  if (n < 2) {
    throw Error(ErrorCode::SampleTooSmall,
                "SampleTooSmall: need at least 2 points, got " + std::to_string(n));
  }
}

[[noreturn]] void report_duplicate(const PointSample& sample, std::size_t i) {
  for (std::size_t j = 0; j < sample.size(); ++j) {
    if (j != i && squared_distance(sample.point(i), sample.point(j)) == 0.0) {
      throw DuplicatePointsError(i, j);
    }
  }
  throw DuplicatePointsError(i, i);  // unreachable for a zero distance
}

std::vector<double> brute_squared(const PointSample& sample, std::size_t threads) {
  const std::size_t n = sample.size();
  std::vector<double> out(n);
  parallel_for(n, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      double best = std::numeric_limits<double>::infinity();
      const auto p = sample.point(i);
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        const double dist = squared_distance(p, sample.point(j));
        if (dist < best) best = dist;
      }
      out[i] = best;
    }
  });
  return out;
}

std::vector<double> index_squared(const PointSample& sample, std::size_t threads) {
  const KdTree tree(sample);
  std::vector<double> out(sample.size());
  parallel_for(sample.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = tree.nearest_other_squared(i);
  });
  return out;
}

struct SortedLine {
  std::vector<PlacedPoint> placed;
  std::vector<std::size_t> order;  // original indices sorted along the line
};

SortedLine sort_line(std::span<const LogPoint> points, std::uint32_t clamp) {
  require_pairs(points.size());
  SortedLine line;
  line.placed.reserve(points.size());
  for (const auto& p : points) line.placed.push_back(place(p, clamp));
  line.order.resize(points.size());
  std::iota(line.order.begin(), line.order.end(), std::size_t{0});
  std::stable_sort(line.order.begin(), line.order.end(), [&](std::size_t a, std::size_t b) {
    return placed_less(line.placed[a], line.placed[b]);
  });

  std::size_t dup_first = points.size();
  std::size_t dup_second = points.size();
  for (std::size_t k = 0; k + 1 < line.order.size();) {
    std::size_t run_end = k + 1;
    const auto& head = line.placed[line.order[k]];
    while (run_end < line.order.size() && !placed_less(head, line.placed[line.order[run_end]])) {
      ++run_end;
    }
    if (run_end - k > 1) {
      // stable sort keeps runs in index order, so the run head is its minimum
      if (line.order[k] < dup_first) {
        dup_first = line.order[k];
        dup_second = line.order[k + 1];
      }
    }
    k = run_end;
  }
  if (dup_first != points.size()) throw DuplicatePointsError(dup_first, dup_second);
  return line;
}

}  // namespace

std::string_view to_string(Backend backend) noexcept {
  return backend == Backend::Brute ? "brute" : "index";
}

Backend parse_backend(std::string_view name) {
  if (name == "brute") return Backend::Brute;
  if (name == "index") return Backend::Index;
  throw Error(ErrorCode::InvalidArgument, "unknown backend '" + std::string(name) + "'");
}

NnDistances nn_distances(const PointSample& sample, Backend backend, std::size_t threads) {
  require_pairs(sample.size());
  std::vector<double> sq = backend == Backend::Brute ? brute_squared(sample, threads)
                                                     : index_squared(sample, threads);
  NnDistances result;
  result.r.resize(sq.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    if (sq[i] == 0.0) report_duplicate(sample, i);
    result.r[i] = std::sqrt(sq[i]);
  }
  return result;
}

std::vector<double> log_nn_distances_1d(std::span<const LogPoint> points, std::uint32_t clamp) {
  const SortedLine line = sort_line(points, clamp);
  const std::size_t n = points.size();
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double best = std::numeric_limits<double>::infinity();
    const auto& here = line.placed[line.order[k]];
    if (k > 0) best = std::min(best, log_distance(here, line.placed[line.order[k - 1]]));
    if (k + 1 < n) best = std::min(best, log_distance(here, line.placed[line.order[k + 1]]));
    out[line.order[k]] = best;
  }
  return out;
}

std::vector<std::size_t> nearest_indices_1d(std::span<const LogPoint> points,
                                            std::uint32_t clamp) {
  const SortedLine line = sort_line(points, clamp);
  const std::size_t n = points.size();
  std::vector<std::size_t> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const auto& here = line.placed[line.order[k]];
    if (k == 0) {
      out[line.order[k]] = line.order[k + 1];
    } else if (k + 1 == n) {
      out[line.order[k]] = line.order[k - 1];
    } else {
      const double below = log_distance(here, line.placed[line.order[k - 1]]);
      const double above = log_distance(here, line.placed[line.order[k + 1]]);
      out[line.order[k]] = above < below ? line.order[k + 1] : line.order[k - 1];
    }
  }
  return out;
}

}  // namespace entropykit
