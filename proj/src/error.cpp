#include "entropykit/error.hpp"

namespace entropykit {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::SampleTooSmall: return "SampleTooSmall";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::InvalidDimension: return "InvalidDimension";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::PrecisionUnachievable: return "PrecisionUnachievable";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

DuplicatePointsError::DuplicatePointsError(std::size_t first, std::size_t second)
    : Error(ErrorCode::DuplicatePoints,
            "DuplicatePoints: points " + std::to_string(first) + " and " +
                std::to_string(second) + " coincide"),
      first_(first),
      second_(second) {}

}  // namespace entropykit
