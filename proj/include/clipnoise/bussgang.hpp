#ifndef CLIPNOISE_BUSSGANG_HPP
#define CLIPNOISE_BUSSGANG_HPP

/**
 * @file bussgang.hpp
 * @brief Linear decomposition of the clipped signal, x_c = beta * x + z.
 *
 * For a zero-mean Gaussian input clipped to [-A1, A2], the attenuation
 * factor beta = E{x_c x}/E{x^2} evaluates in closed form to
 * 1 - Q(alpha1) - Q(alpha2): splitting the cross-moment over the three clip
 * regions, the tail terms -alpha1*phi(alpha1) and -alpha2*phi(alpha2) from
 * the truncated second moment cancel against the rail contributions, leaving
 * only the central Gaussian mass. The test suite gates this closed form
 * against direct numerical integration.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "clipnoise/clipper.hpp"

namespace clipnoise {

/// Bussgang decomposition of one frame: x_c = beta * x + z, with z the
/// clipping noise.
struct LinearDecomposition {
  double beta = 0.0;
  std::vector<double> noise;
  ClipConfig config;
};

/// Closed-form attenuation factor for a Gaussian input.
inline double beta_analytic(const ClipConfig& cfg) {
  cfg.validate();
  return 1.0 - q_function(cfg.alpha1) - q_function(cfg.alpha2);
}

/// Sample-moment estimate sum(x_c * x) / sum(x^2).
inline double beta_empirical(std::span<const double> x, std::span<const double> x_clipped) {
  if (x.size() != x_clipped.size() || x.size() < 2) {
    throw std::invalid_argument("beta_empirical: inputs must have equal length >= 2");
  }
  double lo = x[0];
  double hi = x[0];
  double cross = 0.0;
  double energy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    lo = std::min(lo, x[i]);
    hi = std::max(hi, x[i]);
    cross += x_clipped[i] * x[i];
    energy += x[i] * x[i];
  }
  if (lo == hi) {
    throw std::invalid_argument("beta_empirical: degenerate input, x has zero variance");
  }
  return cross / energy;
}

/// Clipping noise z = x_c - beta * x; the reconstruction identity
/// x_c = beta * x + z then holds exactly.
inline LinearDecomposition decompose(const TimeFrame& frame, const ClippedFrame& clipped,
                                     double beta) {
  if (frame.samples.size() != clipped.samples.size()) {
    throw std::invalid_argument("decompose: frame length " +
                                std::to_string(frame.samples.size()) +
                                " does not match clipped length " +
                                std::to_string(clipped.samples.size()));
  }
  LinearDecomposition d;
  d.beta = beta;
  d.config = clipped.config;
  d.noise.resize(frame.samples.size());
  for (std::size_t i = 0; i < frame.samples.size(); ++i) {
    d.noise[i] = clipped.samples[i] - beta * frame.samples[i];
  }
  return d;
}

/// Clipping noise as a deterministic map of the input sample:
/// g(x) = -A1 - beta*x below the lower bound, (1-beta)*x between the
/// bounds, A2 - beta*x above the upper bound. Piecewise linear and
/// continuous at both knots.
inline double noise_map(double x, double a1, double a2, double beta) noexcept {
  if (x <= -a1) return -a1 - beta * x;
  if (x >= a2) return a2 - beta * x;
  return (1.0 - beta) * x;
}

inline double noise_map(double x, const ClipConfig& cfg, double beta) noexcept {
  return noise_map(x, cfg.a1(), cfg.a2(), beta);
}

}  // namespace clipnoise

#endif
