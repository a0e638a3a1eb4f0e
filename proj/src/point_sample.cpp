#include "entropykit/point_sample.hpp"

#include <cmath>
#include <string>

#include "entropykit/error.hpp"

namespace entropykit {

PointSample::PointSample(std::vector<double> coordinates, std::size_t dimension)
    : coords_(std::move(coordinates)), d_(dimension) {
  if (d_ == 0) {
    throw Error(ErrorCode::InvalidDimension, "InvalidDimension: d must be >= 1");
  }
  if (coords_.size() % d_ != 0) {
    throw Error(ErrorCode::InvalidArgument,
                "coordinate buffer length " + std::to_string(coords_.size()) +
                    " is not a multiple of d = " + std::to_string(d_));
  }
  n_ = coords_.size() / d_;
  for (std::size_t k = 0; k < coords_.size(); ++k) {
    if (!std::isfinite(coords_[k])) {
      throw Error(ErrorCode::InvalidArgument,
                  "non-finite coordinate in point " + std::to_string(k / d_));
    }
  }
}

PointSample PointSample::translated(std::span<const double> shift) const {
  if (shift.size() != d_) {
    throw Error(ErrorCode::DimensionMismatch, "DimensionMismatch: shift has wrong dimension");
  }
  std::vector<double> out(coords_);
  for (std::size_t k = 0; k < out.size(); ++k) out[k] += shift[k % d_];
  return PointSample(std::move(out), d_);
}

PointSample PointSample::scaled(double factor) const {
  std::vector<double> out(coords_);
  for (double& v : out) v *= factor;
  return PointSample(std::move(out), d_);
}

}  // namespace entropykit
