#ifndef CLIPNOISE_STATS_HPP
#define CLIPNOISE_STATS_HPP

/**
 * @file stats.hpp
 * @brief Statistical toolkit: kurtosis, histogram density estimation, ML
 * Gaussian fitting, Hellinger distance, KL divergence, KS statistic.
 *
 * The distance metrics compare a histogram estimate q against a candidate
 * density g via the midpoint rule on the histogram grid: each bin
 * contributes at its center with weight equal to the bin width.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace clipnoise {

/// Thrown when KL divergence is undefined: the candidate density vanishes
/// (or is negative) on a bin that carries empirical mass.
class DivergenceUndefinedError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Fourth standardized moment from plug-in sample moments, no bias
/// correction. Equals 3 for Gaussian data.
inline double kurtosis(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 4) {
    throw std::invalid_argument("kurtosis: need at least 4 samples, got " + std::to_string(n));
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    throw std::invalid_argument("kurtosis: degenerate input, zero variance");
  }
  double mean = 0.0;
  for (const double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double m2 = 0.0;
  double m4 = 0.0;
  for (const double x : samples) {
    const double d = x - mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= static_cast<double>(n);
  m4 /= static_cast<double>(n);
  if (!(m2 > 0.0)) {
    throw std::invalid_argument("kurtosis: degenerate input, zero variance");
  }
  return m4 / (m2 * m2);
}

/// Maximum-likelihood Gaussian fit: sample mean and biased (divisor n)
/// standard deviation.
struct GaussianFit {
  double mu = 0.0;
  double sigma = 1.0;

  double density(double z) const noexcept {
    const double t = (z - mu) / sigma;
    return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * std::numbers::pi));
  }

  /// log density, finite even where density() underflows double range.
  double log_density(double z) const noexcept {
    const double t = (z - mu) / sigma;
    return -0.5 * t * t - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
  }
};

inline GaussianFit fit_gaussian_ml(std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n < 2) {
    throw std::invalid_argument("fit_gaussian_ml: need at least 2 samples");
  }
  const auto [lo, hi] = std::minmax_element(samples.begin(), samples.end());
  if (*lo == *hi) {
    throw std::invalid_argument("fit_gaussian_ml: degenerate input, zero variance");
  }
  double mean = 0.0;
  for (const double x : samples) mean += x;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (const double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(n);
  if (!(var > 0.0)) {
    throw std::invalid_argument("fit_gaussian_ml: degenerate input, zero variance");
  }
  return {mean, std::sqrt(var)};
}

/// Histogram-based density estimate on a uniform grid. Densities are
/// counts / (count * width), so the total mass is exactly 1 over the binned
/// samples.
struct EmpiricalPdf {
  std::vector<double> edges;      // bins + 1 ascending edges
  std::vector<double> centers;    // bin midpoints
  std::vector<double> densities;  // nonnegative, sums to 1/width
  std::size_t count = 0;          // samples binned

  std::size_t bins() const noexcept { return densities.size(); }
  double width() const noexcept { return (edges.back() - edges.front()) / bins(); }

  /// Piecewise-constant density value; zero outside the binned range.
  double density_at(double z) const noexcept {
    if (z < edges.front() || z > edges.back()) return 0.0;
    const double w = width();
    auto b = static_cast<std::size_t>((z - edges.front()) / w);
    if (b >= bins()) b = bins() - 1;
    return densities[b];
  }
};

/// Histogram over a caller-supplied range; samples outside [lo, hi] are
/// excluded and the density normalizes over the binned count.
inline EmpiricalPdf empirical_pdf(std::span<const double> samples, std::size_t bins, double lo,
                                  double hi) {
  if (samples.size() < 100) {
    throw std::invalid_argument("empirical_pdf: need at least 100 samples, got " +
                                std::to_string(samples.size()));
  }
  if (bins < 1) {
    throw std::invalid_argument("empirical_pdf: need at least 1 bin");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("empirical_pdf: degenerate range [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "]");
  }
  EmpiricalPdf pdf;
  pdf.edges.resize(bins + 1);
  pdf.centers.resize(bins);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t b = 0; b <= bins; ++b) {
    pdf.edges[b] = lo + static_cast<double>(b) * width;
  }
  pdf.edges[bins] = hi;
  for (std::size_t b = 0; b < bins; ++b) {
    pdf.centers[b] = lo + (static_cast<double>(b) + 0.5) * width;
  }

  std::vector<std::size_t> counts(bins, 0);
  std::size_t binned = 0;
  for (const double x : samples) {
    if (x < lo || x > hi) continue;
    auto b = static_cast<std::size_t>((x - lo) / width);
    if (b >= bins) b = bins - 1;  // x == hi lands in the last bin
    ++counts[b];
    ++binned;
  }
  if (binned == 0) {
    throw std::invalid_argument("empirical_pdf: no samples inside the requested range");
  }
  pdf.count = binned;
  pdf.densities.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    pdf.densities[b] =
        static_cast<double>(counts[b]) / (static_cast<double>(binned) * width);
  }
  return pdf;
}

/// Histogram over the sample range [min, max] (default policy).
inline EmpiricalPdf empirical_pdf(std::span<const double> samples, std::size_t bins) {
  if (samples.size() < 100) {
    throw std::invalid_argument("empirical_pdf: need at least 100 samples, got " +
                                std::to_string(samples.size()));
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  return empirical_pdf(samples, bins, *lo_it, *hi_it);
}

/// Discretizes an analytic density onto a uniform grid and renormalizes, so
/// the result satisfies the EmpiricalPdf mass convention. Used to evaluate
/// the metric kernels between two analytic densities on a dense grid.
template <class Density>
EmpiricalPdf discretize_density(Density&& f, double lo, double hi, std::size_t bins) {
  if (bins < 1 || !(lo < hi)) {
    throw std::invalid_argument("discretize_density: invalid grid");
  }
  EmpiricalPdf pdf;
  const double width = (hi - lo) / static_cast<double>(bins);
  pdf.edges.resize(bins + 1);
  pdf.centers.resize(bins);
  pdf.densities.resize(bins);
  for (std::size_t b = 0; b <= bins; ++b) pdf.edges[b] = lo + static_cast<double>(b) * width;
  double mass = 0.0;
  for (std::size_t b = 0; b < bins; ++b) {
    pdf.centers[b] = lo + (static_cast<double>(b) + 0.5) * width;
    const double d = f(pdf.centers[b]);
    if (!(d >= 0.0)) {
      throw std::invalid_argument("discretize_density: density must be nonnegative");
    }
    pdf.densities[b] = d;
    mass += d * width;
  }
  if (!(mass > 0.0)) {
    throw std::invalid_argument("discretize_density: density has no mass on the grid");
  }
  for (auto& d : pdf.densities) d /= mass;
  pdf.count = bins;
  return pdf;
}

/// Hellinger distance between a histogram estimate and a candidate density,
/// H = sqrt(1 - sum_b sqrt(q_b * g(c_b)) * width), clamped to [0, 1].
template <class Density>
double hellinger_distance(const EmpiricalPdf& q, Density&& g) {
  const double width = q.width();
  double integral = 0.0;
  for (std::size_t b = 0; b < q.bins(); ++b) {
    const double gb = g(q.centers[b]);
    if (!(gb >= 0.0)) {
      throw std::invalid_argument("hellinger_distance: candidate density is negative at z=" +
                                  std::to_string(q.centers[b]));
    }
    integral += std::sqrt(q.densities[b] * gb) * width;
  }
  return std::sqrt(std::clamp(1.0 - integral, 0.0, 1.0));
}

/// KL divergence D(q || g) = sum_{b: q_b > 0} q_b * ln(q_b / g(c_b)) * width.
/// Empty bins contribute zero (limit convention).
template <class Density>
double kl_divergence(const EmpiricalPdf& q, Density&& g) {
  const double width = q.width();
  double divergence = 0.0;
  for (std::size_t b = 0; b < q.bins(); ++b) {
    const double qb = q.densities[b];
    if (qb <= 0.0) continue;
    const double gb = g(q.centers[b]);
    if (!(gb > 0.0)) {
      throw DivergenceUndefinedError(
          "kl_divergence: candidate density vanishes on a populated bin at z=" +
          std::to_string(q.centers[b]));
    }
    divergence += qb * std::log(qb / gb) * width;
  }
  return divergence;
}

/// KL divergence with the candidate supplied in the log domain. Needed when
/// the candidate is analytically positive but its density underflows double
/// range far from the mode (a Gaussian already underflows beyond ~38 sigma).
template <class LogDensity>
double kl_divergence_log(const EmpiricalPdf& q, LogDensity&& log_g) {
  const double width = q.width();
  double divergence = 0.0;
  for (std::size_t b = 0; b < q.bins(); ++b) {
    const double qb = q.densities[b];
    if (qb <= 0.0) continue;
    const double lg = log_g(q.centers[b]);
    if (!std::isfinite(lg)) {
      throw DivergenceUndefinedError(
          "kl_divergence_log: candidate density vanishes on a populated bin at z=" +
          std::to_string(q.centers[b]));
    }
    divergence += qb * (std::log(qb) - lg) * width;
  }
  return divergence;
}

/// Kolmogorov-Smirnov statistic of a sample against an analytic cdf,
/// sup_z |F_emp(z) - F(z)|.
template <class Cdf>
double ks_statistic(std::vector<double> samples, Cdf&& cdf) {
  if (samples.empty()) {
    throw std::invalid_argument("ks_statistic: empty sample");
  }
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = cdf(samples[i]);
    ks = std::max(ks, std::abs(static_cast<double>(i + 1) / n - f));
    ks = std::max(ks, std::abs(f - static_cast<double>(i) / n));
  }
  return ks;
}

}  // namespace clipnoise

#endif
