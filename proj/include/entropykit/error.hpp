#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace entropykit {

enum class ErrorCode {
  SampleTooSmall,
  DuplicatePoints,
  InvalidDimension,
  DimensionMismatch,
  InvalidArgument,
  PrecisionUnachievable,
  EmptyInput,
  ParseError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Two sample points coincide, so ln R is undefined. The pair is the
/// smallest index i with a zero neighbour distance and its first twin j.
class DuplicatePointsError : public Error {
 public:
  DuplicatePointsError(std::size_t first, std::size_t second);

  std::pair<std::size_t, std::size_t> indices() const noexcept {
    return {first_, second_};
  }

 private:
  std::size_t first_;
  std::size_t second_;
};

}  // namespace entropykit
