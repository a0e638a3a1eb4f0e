#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace entropykit {

/// Neumaier-compensated sum in the given order.
inline double compensated_sum(std::span<const double> terms) noexcept {
  double sum = 0.0;
  double carry = 0.0;
  for (double t : terms) {
    const double next = sum + t;
    if (std::fabs(sum) >= std::fabs(t)) {
      carry += (sum - next) + t;
    } else {
      carry += (t - next) + sum;
    }
    sum = next;
  }
  return sum + carry;
}

/// Compensated sum over the terms in ascending order. The result depends
/// only on the multiset of terms, never on their arrangement.
inline double order_free_sum(std::vector<double> terms) {
  std::sort(terms.begin(), terms.end());
  return compensated_sum(terms);
}

inline double order_free_mean(std::vector<double> terms) {
  const double count = static_cast<double>(terms.size());
  return order_free_sum(std::move(terms)) / count;
}

}  // namespace entropykit
