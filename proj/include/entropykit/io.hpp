#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "entropykit/point_sample.hpp"

namespace entropykit {

/// One point per line, coordinates separated by commas. Blank lines are
/// skipped. Throws ParseError naming the 1-based line on malformed input.
PointSample parse_points_csv(std::string_view text);

/// Lines of "interval,fraction" for points of the union-of-intervals set.
std::vector<LogPoint> parse_logpoints_csv(std::string_view text);

/// Whole file as a string; throws IoError.
std::string read_text_file(const std::string& path);

}  // namespace entropykit
