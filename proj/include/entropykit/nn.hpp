#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "entropykit/interval_set.hpp"
#include "entropykit/point_sample.hpp"

namespace entropykit {

enum class Backend { Brute, Index };

std::string_view to_string(Backend backend) noexcept;
/// Accepts "brute" and "index"; throws InvalidArgument otherwise.
Backend parse_backend(std::string_view name);

/// Nearest-neighbour distances R_i = min_{j != i} |X_i - X_j|.
struct NnDistances {
  std::vector<double> r;
  std::optional<std::vector<double>> log_r;
};

/// Throws SampleTooSmall for n < 2 and DuplicatePointsError if any R_i is 0.
/// Both backends compare squared distances and take one square root at the
/// end, so they return identical vectors. `threads` = 0 uses all cores;
/// the result does not depend on it.
NnDistances nn_distances(const PointSample& sample, Backend backend = Backend::Index,
                         std::size_t threads = 1);

/// ln R_i for points of the union-of-intervals set, computed without ever
/// forming a_j. Interval indices above `clamp` are moved to interval `clamp`
/// keeping their absolute offset.
std::vector<double> log_nn_distances_1d(std::span<const LogPoint> points,
                                        std::uint32_t clamp = kDefaultIntervalClamp);

/// Index of the nearest other point for each LogPoint (ties: lower neighbour).
std::vector<std::size_t> nearest_indices_1d(std::span<const LogPoint> points,
                                            std::uint32_t clamp = kDefaultIntervalClamp);

}  // namespace entropykit
