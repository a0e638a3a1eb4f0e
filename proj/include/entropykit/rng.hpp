#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace entropykit {

/// SplitMix64 finaliser: a bijective 64-bit mixing function.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purpose tags keep streams for different uses of one cell disjoint.
enum class StreamPurpose : std::uint64_t {
  Sample = 1,
  BallMassMonteCarlo = 2,
  Reference = 3,
  LogTailMonteCarlo = 4,
};

/// Key for the stream of (seed, a, b, purpose): each component is folded in
/// through mix64, so nearby seeds or indices give unrelated streams.
inline constexpr std::uint64_t derive_stream_key(std::uint64_t seed, std::uint64_t a,
                                                 std::uint64_t b,
                                                 StreamPurpose purpose) noexcept {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ a);
  k = mix64(k ^ (b + 0x632be59bd9b4e019ULL));
  return mix64(k ^ static_cast<std::uint64_t>(purpose));
}

/// Counter-based generator: draw k is mix64(key + k * golden). All variate
/// transforms are written out here instead of using <random> distributions,
/// whose output is implementation-defined.
class RngStream {
 public:
  explicit constexpr RngStream(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next() noexcept {
    ++counter_;
    return mix64(key_ + counter_ * 0x9e3779b97f4a7c15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double uniform_open_low() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  double exponential() noexcept { return -std::log(uniform_open_low()); }

  /// Standard normal via Box-Muller, caching the second variate.
  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double radius = std::sqrt(-2.0 * std::log(uniform_open_low()));
    const double angle = 2.0 * std::numbers::pi * uniform();
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t draws() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace entropykit
