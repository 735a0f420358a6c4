#ifndef CLIPNOISE_RNG_HPP
#define CLIPNOISE_RNG_HPP

/**
 * @file rng.hpp
 * @brief Deterministic counter-based random number generation.
 *
 * All randomness in the library flows through SplitMix64 (Steele/Lea/Flood,
 * "Fast splittable pseudorandom number generators", OOPSLA 2014). The
 * generator is a 64-bit counter advanced by the golden-ratio increment and
 * passed through an avalanche finalizer, so any output can be computed
 * directly from (seed, counter) without iterating. Sub-streams (one per
 * OFDM frame, one per sweep grid point) are derived by the same mix, which
 * makes frame generation order-independent and parallelizable.
 */

#include <cstdint>
#include <cmath>
#include <numbers>

namespace clipnoise {

inline constexpr std::uint64_t kGolden64 = 0x9E3779B97F4A7C15ull;

/// SplitMix64 finalizer: full-avalanche 64-bit mix.
[[nodiscard]] constexpr std::uint64_t avalanche64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Sub-stream seed for element `index` of the stream rooted at `seed`.
/// Equals the (index+1)-th raw SplitMix64 output, i.e. a pure function of
/// (seed, index): avalanche64(seed + (index + 1) * kGolden64).
[[nodiscard]] constexpr std::uint64_t substream_seed(std::uint64_t seed,
                                                     std::uint64_t index) noexcept {
  return avalanche64(seed + (index + 1) * kGolden64);
}

/// SplitMix64 stream.
class Splitmix64 {
 public:
  explicit constexpr Splitmix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    state_ += kGolden64;
    return avalanche64(state_);
  }

  /// Uniform double in (0, 1], 53 significant bits.
  double next_unit() noexcept {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Standard normal variates via Box-Muller over a Splitmix64 stream.
/// The second variate of each pair is cached.
class NormalSampler {
 public:
  explicit NormalSampler(std::uint64_t seed) noexcept : rng_(seed) {}

  double next() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = rng_.next_unit();
    const double u2 = rng_.next_unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  Splitmix64 rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Bit stream over successive SplitMix64 words, most significant bit first.
class BitStream {
 public:
  explicit constexpr BitStream(std::uint64_t seed) noexcept : rng_(seed) {}

  constexpr std::uint8_t next_bit() noexcept {
    if (remaining_ == 0) {
      word_ = rng_.next();
      remaining_ = 64;
    }
    --remaining_;
    return static_cast<std::uint8_t>((word_ >> remaining_) & 1u);
  }

 private:
  Splitmix64 rng_;
  std::uint64_t word_ = 0;
  int remaining_ = 0;
};

}  // namespace clipnoise

#endif
