#ifndef CLIPNOISE_NOISE_MODEL_HPP
#define CLIPNOISE_NOISE_MODEL_HPP

/**
 * @file noise_model.hpp
 * @brief Closed-form distribution of the clipping noise z = x_c - beta*x.
 *
 * The noise is the pushforward of the Gaussian input through the piecewise
 * linear map g of bussgang.hpp, which makes its law a piecewise mixture:
 * inside (-(1-beta)A1, (1-beta)A2) the density is the sum of three scaled
 * Gaussian terms (one per clip region), outside only the matching tail term
 * survives. The density is discontinuous at the region knots; the knots
 * themselves evaluate with the one-sided tail branches.
 */

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipnoise/bussgang.hpp"
#include "clipnoise/clipper.hpp"
#include "clipnoise/rng.hpp"

namespace clipnoise {

class ClipNoisePdf {
 public:
  static ClipNoisePdf make(double beta, double a1, double a2, double sigma_x) {
    if (!(a1 > 0.0) || !(a2 > 0.0) || !(sigma_x > 0.0)) {
      throw std::invalid_argument("ClipNoisePdf: A1, A2 and sigma_x must be positive");
    }
    if (!(beta > 0.0) || !(beta < 1.0)) {
      throw std::invalid_argument("ClipNoisePdf: beta must lie in (0, 1), got " +
                                  std::to_string(beta));
    }
    if (1.0 - beta < 1e-12) {
      throw std::invalid_argument("ClipNoisePdf: 1 - beta below 1e-12, middle branch degenerate");
    }
    return ClipNoisePdf(beta, a1, a2, sigma_x);
  }

  /// Model for a given clip configuration, using the analytic beta.
  static ClipNoisePdf from_config(const ClipConfig& cfg) {
    cfg.validate();
    return make(beta_analytic(cfg), cfg.a1(), cfg.a2(), cfg.sigma_x);
  }

  double beta() const noexcept { return beta_; }
  double a1() const noexcept { return a1_; }
  double a2() const noexcept { return a2_; }
  double sigma_x() const noexcept { return sigma_; }

  /// Region boundaries of the piecewise law.
  double lower_knot() const noexcept { return -(1.0 - beta_) * a1_; }
  double upper_knot() const noexcept { return (1.0 - beta_) * a2_; }

  /// Integration window covering all but < 1e-12 of the probability mass.
  double window_lo() const noexcept { return -a1_ - 10.0 * beta_ * sigma_; }
  double window_hi() const noexcept { return a2_ + 10.0 * beta_ * sigma_; }

  /// Density of z. Knots use the one-sided tail branches.
  double pdf(double z) const noexcept {
    const double tail_low_clip = normal_pdf((-a1_ - z) / beta_, sigma_) / beta_;
    const double tail_high_clip = normal_pdf((a2_ - z) / beta_, sigma_) / beta_;
    if (z >= upper_knot()) return tail_low_clip;
    if (z <= lower_knot()) return tail_high_clip;
    return normal_pdf(z / (1.0 - beta_), sigma_) / (1.0 - beta_) + tail_low_clip +
           tail_high_clip;
  }

  /// Cumulative distribution of z, Pr(z < gamma).
  double cdf(double gamma) const noexcept {
    const double beta_scale = beta_ * sigma_;
    if (gamma >= upper_knot()) {
      return q_function((-a1_ - gamma) / beta_scale);
    }
    if (gamma <= lower_knot()) {
      return q_function((a2_ - gamma) / beta_scale);
    }
    // Middle branch. The printed interval ((-A1-gamma)/beta, gamma/(1-beta))
    // is nonempty everywhere inside the open middle region (it degenerates
    // exactly at the lower knot); the clamp only guards round-off.
    const double central = normal_cdf(gamma / ((1.0 - beta_) * sigma_)) -
                           normal_cdf((-a1_ - gamma) / beta_scale);
    return std::max(0.0, central) + q_function((a2_ - gamma) / beta_scale);
  }

  /// Survival function Pr(z > gamma), computed without the cancellation a
  /// plain 1 - cdf(gamma) suffers in the far upper tail.
  double survival(double gamma) const noexcept {
    const double beta_scale = beta_ * sigma_;
    if (gamma >= upper_knot()) {
      // 1 - Q((-A1-gamma)/..) = Phi((-A1-gamma)/..) = Q((A1+gamma)/..)
      return q_function((a1_ + gamma) / beta_scale);
    }
    return 1.0 - cdf(gamma);
  }

  /// Probability of the interval (lo, hi], accurate in both tails.
  double interval_mass(double lo, double hi) const noexcept {
    if (hi <= lo) return 0.0;
    if (cdf(hi) < 0.5) return cdf(hi) - cdf(lo);
    return survival(lo) - survival(hi);
  }

  /// Exact sampling of the law: draws x ~ N(0, sigma_x^2) and pushes it
  /// through the clipping-noise map.
  std::vector<double> sample(std::size_t count, std::uint64_t seed) const {
    if (count < 1) {
      throw std::invalid_argument("ClipNoisePdf::sample: count must be >= 1");
    }
    NormalSampler normal(seed);
    std::vector<double> z(count);
    for (auto& value : z) {
      value = noise_map(sigma_ * normal.next(), a1_, a2_, beta_);
    }
    return z;
  }

 private:
  ClipNoisePdf(double beta, double a1, double a2, double sigma_x) noexcept
      : beta_(beta), a1_(a1), a2_(a2), sigma_(sigma_x) {}

  double beta_;
  double a1_;
  double a2_;
  double sigma_;
};

}  // namespace clipnoise

#endif
