#include "entropykit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "entropykit/error.hpp"

namespace entropykit {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
  throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": " + what);
}

// Splits into lines and calls fn(line_no, fields) for every nonblank line.
template <typename Fn>
void for_each_record(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    const std::string_view line = trim(text.substr(0, nl));
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    fn(line_no, fields);
  }
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
    fail(line_no, "'" + std::string(field) + "' is not a number");
  }
  if (!std::isfinite(v)) fail(line_no, "coordinate is not finite");
  return v;
}

}  // namespace

PointSample parse_points_csv(std::string_view text) {
  std::vector<double> coords;
  std::size_t d = 0;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (d == 0) d = fields.size();
    if (fields.size() != d) {
      fail(line_no, "expected " + std::to_string(d) + " coordinates, got " + std::to_string(fields.size()));
    }
    for (auto f : fields) coords.push_back(parse_double(f, line_no));
  });
  if (d == 0) throw Error(ErrorCode::ParseError, "line 1: no points in input");
  return PointSample(std::move(coords), d);
}

std::vector<LogPoint> parse_logpoints_csv(std::string_view text) {
  std::vector<LogPoint> out;
  for_each_record(text, [&](std::size_t line_no, const std::vector<std::string_view>& fields) {
    if (fields.size() != 2) fail(line_no, "expected 'interval,fraction'");
    unsigned interval = 0;
    const auto f = fields[0];
    const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), interval);
    if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || interval < 1) {
      fail(line_no, "interval index must be a positive integer");
    }
    const double fraction = parse_double(fields[1], line_no);
    if (fraction < 0.0 || fraction > 1.0) fail(line_no, "fraction must lie in [0, 1]");
    out.push_back({interval, fraction});
  });
  if (out.empty()) throw Error(ErrorCode::ParseError, "line 1: no points in input");
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "IoError: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace entropykit
