#ifndef CLIPNOISE_QAM_HPP
#define CLIPNOISE_QAM_HPP

/**
 * @file qam.hpp
 * @brief Square M-QAM constellations with Gray labeling and unit average energy.
 *
 * Labeling convention: a symbol label of b = log2(M) bits is split into the
 * first b/2 bits (I axis) and last b/2 bits (Q axis), each read MSB-first as
 * a Gray code. With L = sqrt(M) levels per axis and v the Gray-decoded index,
 * the axis amplitude is (L-1) - 2v, giving the odd-integer lattice
 * {-(L-1), ..., -1, +1, ..., +(L-1)}. The lattice is scaled by
 * 1/sqrt(2(M-1)/3) so that the average symbol energy is exactly 1.
 * Under this convention the all-zero label maps to the top-right corner;
 * for 4-QAM, bits 00 -> (1+j)/sqrt(2).
 */

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clipnoise {

struct QamConstellation {
  int order = 0;
  int bits_per_symbol = 0;
  std::vector<std::complex<double>> points;  // indexed by MSB-first bit label

  static QamConstellation make(int order);
};

namespace detail {

/// Gray code -> binary index.
constexpr unsigned gray_decode(unsigned g) noexcept {
  unsigned v = g;
  for (unsigned shift = 1; shift < 8 * sizeof(unsigned); shift <<= 1) {
    v ^= v >> shift;
  }
  return v;
}

}  // namespace detail

inline QamConstellation QamConstellation::make(int order) {
  if (order != 4 && order != 16 && order != 64 && order != 256) {
    throw std::invalid_argument("QamConstellation: order must be 4, 16, 64 or 256, got " +
                                std::to_string(order));
  }
  QamConstellation c;
  c.order = order;
  c.bits_per_symbol = static_cast<int>(std::lround(std::log2(order)));

  const int half_bits = c.bits_per_symbol / 2;
  const unsigned levels = 1u << half_bits;
  const double scale = 1.0 / std::sqrt(2.0 * (order - 1) / 3.0);

  c.points.resize(static_cast<std::size_t>(order));
  for (unsigned label = 0; label < static_cast<unsigned>(order); ++label) {
    const unsigned gi = label >> half_bits;
    const unsigned gq = label & (levels - 1);
    const double ai = static_cast<double>(levels - 1) - 2.0 * detail::gray_decode(gi);
    const double aq = static_cast<double>(levels - 1) - 2.0 * detail::gray_decode(gq);
    c.points[label] = {ai * scale, aq * scale};
  }
  return c;
}

/// Maps a bit sequence onto constellation symbols, one symbol per
/// bits_per_symbol group, MSB first within the group.
inline std::vector<std::complex<double>> map_bits(std::span<const std::uint8_t> bits,
                                                  const QamConstellation& constellation) {
  const auto bps = static_cast<std::size_t>(constellation.bits_per_symbol);
  if (bps == 0 || bits.size() % bps != 0) {
    throw std::invalid_argument("map_bits: bit count " + std::to_string(bits.size()) +
                                " is not a multiple of bits_per_symbol " + std::to_string(bps));
  }
  std::vector<std::complex<double>> symbols;
  symbols.reserve(bits.size() / bps);
  for (std::size_t i = 0; i < bits.size(); i += bps) {
    unsigned label = 0;
    for (std::size_t k = 0; k < bps; ++k) {
      label = (label << 1) | (bits[i + k] & 1u);
    }
    symbols.push_back(constellation.points[label]);
  }
  return symbols;
}

}  // namespace clipnoise

#endif
