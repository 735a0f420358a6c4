#ifndef CLIPNOISE_SIGNAL_CHAIN_HPP
#define CLIPNOISE_SIGNAL_CHAIN_HPP

/**
 * @file signal_chain.hpp
 * @brief DCO-OFDM time-domain frame generation.
 *
 * Chain: random bits -> M-QAM symbols -> Hermitian-symmetric frequency
 * vector -> unitary IFFT -> real samples. With unit-energy QAM on the N-2
 * active subcarriers and 1/sqrt(N) IFFT scaling, the per-sample variance of
 * the output is (N-2)/N, so sigma_x stays close to 1 regardless of N.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipnoise/fft.hpp"
#include "clipnoise/qam.hpp"
#include "clipnoise/rng.hpp"

namespace clipnoise {

/// Relative imaginary residue allowed after the IFFT of a Hermitian vector.
inline constexpr double kImagResidueTolerance = 1e-9;

/// Frequency-domain vector with I_0 = I_{N/2} = 0 and I_{N-k} = conj(I_k).
struct HermitianVector {
  std::vector<std::complex<double>> bins;

  std::size_t size() const noexcept { return bins.size(); }
};

/// One OFDM symbol's real time-domain samples plus the nominal standard
/// deviation of the unclipped process.
struct TimeFrame {
  std::vector<double> samples;
  double sigma_x = 0.0;

  std::size_t size() const noexcept { return samples.size(); }
};

/// Arranges N/2-1 data symbols into the standard Hermitian layout
/// [0, S_1, ..., S_{N/2-1}, 0, conj(S_{N/2-1}), ..., conj(S_1)].
inline HermitianVector build_hermitian(std::span<const std::complex<double>> symbols,
                                       std::size_t n) {
  if (n < 4 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("build_hermitian: N must be a power of two >= 4, got " +
                                std::to_string(n));
  }
  if (symbols.size() != n / 2 - 1) {
    throw std::invalid_argument("build_hermitian: expected " + std::to_string(n / 2 - 1) +
                                " symbols for N=" + std::to_string(n) + ", got " +
                                std::to_string(symbols.size()));
  }
  HermitianVector v;
  v.bins.assign(n, {0.0, 0.0});
  for (std::size_t k = 1; k < n / 2; ++k) {
    v.bins[k] = symbols[k - 1];
    v.bins[n - k] = std::conj(symbols[k - 1]);
  }
  return v;
}

namespace detail {

inline TimeFrame ifft_with_plan(const HermitianVector& v, const Radix2Fft& plan) {
  const std::size_t n = v.size();
  std::vector<std::complex<double>> work(v.bins);
  plan.inverse(work);

  double max_mag = 0.0;
  double max_imag = 0.0;
  for (const auto& s : work) {
    max_mag = std::max(max_mag, std::abs(s.real()));
    max_imag = std::max(max_imag, std::abs(s.imag()));
  }
  if (max_mag > 0.0 && max_imag > kImagResidueTolerance * max_mag) {
    throw std::runtime_error("ifft: imaginary residue " + std::to_string(max_imag / max_mag) +
                             " exceeds tolerance; input is not Hermitian-symmetric");
  }

  TimeFrame frame;
  frame.samples.resize(n);
  std::transform(work.begin(), work.end(), frame.samples.begin(),
                 [](const std::complex<double>& s) { return s.real(); });
  frame.sigma_x = std::sqrt(static_cast<double>(n - 2) / static_cast<double>(n));
  return frame;
}

}  // namespace detail

/// Unitary IFFT of a Hermitian vector. Verifies the imaginary residue and
/// discards it; sigma_x is set to the analytic value sqrt((N-2)/N) implied
/// by unit-energy QAM under the 1/sqrt(N) convention.
inline TimeFrame ifft(const HermitianVector& v) {
  return detail::ifft_with_plan(v, Radix2Fft(v.size()));
}

/// Deterministic DCO-OFDM frame source. Frame `i` is a pure function of
/// (seed, i): its bits come from a SplitMix64 stream seeded with
/// substream_seed(seed, i), so frames are order-independent and can be
/// produced in parallel.
class FrameGenerator {
 public:
  FrameGenerator(std::size_t n, QamConstellation constellation, std::uint64_t seed)
      : n_(n), constellation_(std::move(constellation)), seed_(seed), plan_(validated(n)) {}

  std::size_t frame_length() const noexcept { return n_; }
  std::uint64_t seed() const noexcept { return seed_; }

  TimeFrame frame(std::uint64_t index) const {
    const std::size_t n_symbols = n_ / 2 - 1;
    const auto bps = static_cast<std::size_t>(constellation_.bits_per_symbol);
    BitStream bit_stream(substream_seed(seed_, index));
    std::vector<std::uint8_t> bits(n_symbols * bps);
    for (auto& b : bits) b = bit_stream.next_bit();
    const auto symbols = map_bits(bits, constellation_);
    return detail::ifft_with_plan(build_hermitian(symbols, n_), plan_);
  }

 private:
  static std::size_t validated(std::size_t n) {
    if (n < 64 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("FrameGenerator: N must be a power of two >= 64, got " +
                                  std::to_string(n));
    }
    return n;
  }

  std::size_t n_;
  QamConstellation constellation_;
  std::uint64_t seed_;
  Radix2Fft plan_;
};

/// Materializes `count` frames. count = 0 yields an empty stream.
inline std::vector<TimeFrame> generate_frames(std::size_t count, std::size_t n,
                                              const QamConstellation& constellation,
                                              std::uint64_t seed) {
  FrameGenerator generator(n, constellation, seed);
  std::vector<TimeFrame> frames;
  frames.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    frames.push_back(generator.frame(i));
  }
  return frames;
}

}  // namespace clipnoise

#endif
