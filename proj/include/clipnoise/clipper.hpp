#ifndef CLIPNOISE_CLIPPER_HPP
#define CLIPNOISE_CLIPPER_HPP

/**
 * @file clipper.hpp
 * @brief Double-sided clipping, DC biasing, and the mixed pdf of the clipped
 * signal.
 *
 * The clipping bounds are expressed relative to the nominal standard
 * deviation of the OFDM symbol: A1 = alpha1 * sigma_x below, A2 = alpha2 *
 * sigma_x above. Samples at or beyond a bound are pinned to it, so the
 * clipped signal's distribution is a truncated Gaussian plus two point
 * masses of Q(alpha1) and Q(alpha2) at the rails.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipnoise/signal_chain.hpp"

namespace clipnoise {

/// Operational range for the normalized clipping bounds. Below 0.1 the
/// clipped signal is nearly all rail mass and the linear decomposition
/// degenerates; above 6 the clipping probability drops under 1e-9 and the
/// noise pdf's middle branch becomes numerically Dirac-like.
inline constexpr double kAlphaMin = 0.1;
inline constexpr double kAlphaMax = 6.0;

/// Upper-tail probability of the standard normal,
/// Q(y) = (1/sqrt(2*pi)) * integral_y^inf exp(-v^2/2) dv.
/// Computed as erfc(y/sqrt(2))/2; relative error is at the level of a few
/// ulps of the platform erfc over |y| <= 8.
inline double q_function(double y) { return 0.5 * std::erfc(y / std::numbers::sqrt2); }

/// Standard normal cdf, Phi(y) = 1 - Q(y).
inline double normal_cdf(double y) { return 0.5 * std::erfc(-y / std::numbers::sqrt2); }

/// Zero-mean Gaussian density with standard deviation sigma.
inline double normal_pdf(double x, double sigma) {
  const double t = x / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Clipping and biasing parameters. A1/A2/I_bias/I_high are derived from
/// (alpha1, alpha2, sigma_x, i_l) on the fly so the defining identities hold
/// exactly.
struct ClipConfig {
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double sigma_x = 1.0;
  double i_l = 0.0;  // LED minimum operating current

  double a1() const noexcept { return alpha1 * sigma_x; }
  double a2() const noexcept { return alpha2 * sigma_x; }
  double i_bias() const noexcept { return a1() + i_l; }
  double i_high() const noexcept { return i_bias() + a2(); }

  void validate() const {
    if (!(sigma_x > 0.0) || !std::isfinite(sigma_x)) {
      throw std::invalid_argument("ClipConfig: sigma_x must be positive and finite");
    }
    for (const double alpha : {alpha1, alpha2}) {
      if (!(alpha >= kAlphaMin) || !(alpha <= kAlphaMax)) {
        throw std::invalid_argument("ClipConfig: alpha " + std::to_string(alpha) +
                                    " outside operational range [" + std::to_string(kAlphaMin) +
                                    ", " + std::to_string(kAlphaMax) + "]");
      }
    }
    if (!std::isfinite(i_l)) {
      throw std::invalid_argument("ClipConfig: i_l must be finite");
    }
  }

  static ClipConfig make(double alpha1, double alpha2, double sigma_x, double i_l = 0.0) {
    ClipConfig cfg{alpha1, alpha2, sigma_x, i_l};
    cfg.validate();
    return cfg;
  }
};

/// A clipped frame plus the counts of samples pinned to each rail.
struct ClippedFrame {
  std::vector<double> samples;
  ClipConfig config;
  std::size_t clipped_low_count = 0;
  std::size_t clipped_high_count = 0;
};

/// Double-sided hard clipping: x <= -A1 maps to -A1, x >= A2 maps to A2,
/// anything between passes through.
inline ClippedFrame clip_frame(const TimeFrame& frame, const ClipConfig& cfg) {
  cfg.validate();
  const double a1 = cfg.a1();
  const double a2 = cfg.a2();
  ClippedFrame out;
  out.config = cfg;
  out.samples.reserve(frame.samples.size());
  for (const double x : frame.samples) {
    if (x <= -a1) {
      out.samples.push_back(-a1);
      ++out.clipped_low_count;
    } else if (x >= a2) {
      out.samples.push_back(a2);
      ++out.clipped_high_count;
    } else {
      out.samples.push_back(x);
    }
  }
  return out;
}

/// Adds the DC bias; the result lies in the LED drive range [i_l, i_high].
inline std::vector<double> bias_frame(const ClippedFrame& clipped) {
  const double bias = clipped.config.i_bias();
  std::vector<double> out;
  out.reserve(clipped.samples.size());
  for (const double x : clipped.samples) out.push_back(x + bias);
  return out;
}

/// Mixed discrete/continuous distribution of the clipped signal: delta
/// atoms Q(alpha1) at -A1 and Q(alpha2) at A2, and the N(0, sigma_x^2)
/// density restricted to the open interval (-A1, A2).
struct MixedPdf {
  struct Atom {
    double location;
    double mass;
  };

  std::vector<Atom> atoms;
  double lower = 0.0;  // -A1
  double upper = 0.0;  // A2
  double sigma_x = 1.0;

  double continuous_density(double x) const noexcept {
    if (x <= lower || x >= upper) return 0.0;
    return normal_pdf(x, sigma_x);
  }

  /// Closed-form mass of the continuous part, 1 - Q(alpha1) - Q(alpha2).
  double continuous_mass() const noexcept {
    return 1.0 - q_function(-lower / sigma_x) - q_function(upper / sigma_x);
  }

  double total_mass() const noexcept {
    double total = continuous_mass();
    for (const auto& atom : atoms) total += atom.mass;
    return total;
  }
};

inline MixedPdf clipped_signal_pdf(const ClipConfig& cfg) {
  cfg.validate();
  MixedPdf pdf;
  pdf.lower = -cfg.a1();
  pdf.upper = cfg.a2();
  pdf.sigma_x = cfg.sigma_x;
  pdf.atoms = {{-cfg.a1(), q_function(cfg.alpha1)}, {cfg.a2(), q_function(cfg.alpha2)}};
  return pdf;
}

}  // namespace clipnoise

#endif
