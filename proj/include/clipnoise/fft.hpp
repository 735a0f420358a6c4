#ifndef CLIPNOISE_FFT_HPP
#define CLIPNOISE_FFT_HPP

/**
 * @file fft.hpp
 * @brief Iterative radix-2 decimation-in-time FFT, unitary scaling.
 *
 * Both directions scale by 1/sqrt(N), so forward followed by inverse is the
 * identity and Parseval holds without extra factors. Twiddle factors are
 * tabulated once per transform size.
 */

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace clipnoise {

class Radix2Fft {
 public:
  explicit Radix2Fft(std::size_t n) : n_(n) {
    if (n < 2 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("Radix2Fft: size must be a power of two >= 2, got " +
                                  std::to_string(n));
    }
    // exp(+j 2 pi k / n) for k < n/2; conjugated on the fly for the forward
    // direction.
    twiddles_.resize(n / 2);
    for (std::size_t k = 0; k < n / 2; ++k) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      twiddles_[k] = std::polar(1.0, angle);
    }
    bit_reverse_.resize(n);
    const int log2n = log2_size();
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t r = 0;
      for (int b = 0; b < log2n; ++b) {
        r = (r << 1) | ((i >> b) & 1u);
      }
      bit_reverse_[i] = r;
    }
  }

  std::size_t size() const noexcept { return n_; }

  /// In-place inverse transform: x[n] = (1/sqrt(N)) sum_k X[k] exp(+j2pikn/N).
  void inverse(std::span<std::complex<double>> data) const { transform(data, +1); }

  /// In-place forward transform: X[k] = (1/sqrt(N)) sum_n x[n] exp(-j2pikn/N).
  void forward(std::span<std::complex<double>> data) const { transform(data, -1); }

 private:
  int log2_size() const noexcept {
    int l = 0;
    for (std::size_t m = n_; m > 1; m >>= 1) ++l;
    return l;
  }

  void transform(std::span<std::complex<double>> data, int sign) const {
    if (data.size() != n_) {
      throw std::invalid_argument("Radix2Fft: data length " + std::to_string(data.size()) +
                                  " does not match plan size " + std::to_string(n_));
    }
    for (std::size_t i = 0; i < n_; ++i) {
      const std::size_t j = bit_reverse_[i];
      if (j > i) std::swap(data[i], data[j]);
    }
    for (std::size_t len = 2; len <= n_; len <<= 1) {
      const std::size_t half = len / 2;
      const std::size_t step = n_ / len;
      for (std::size_t start = 0; start < n_; start += len) {
        for (std::size_t k = 0; k < half; ++k) {
          std::complex<double> w = twiddles_[k * step];
          if (sign < 0) w = std::conj(w);
          const std::complex<double> odd = data[start + k + half] * w;
          const std::complex<double> even = data[start + k];
          data[start + k] = even + odd;
          data[start + k + half] = even - odd;
        }
      }
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    for (auto& v : data) v *= scale;
  }

  std::size_t n_;
  std::vector<std::complex<double>> twiddles_;
  std::vector<std::size_t> bit_reverse_;
};

}  // namespace clipnoise

#endif
