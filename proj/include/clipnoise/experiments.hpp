#ifndef CLIPNOISE_EXPERIMENTS_HPP
#define CLIPNOISE_EXPERIMENTS_HPP

/**
 * @file experiments.hpp
 * @brief Sweep harness over clipping-bound grids.
 *
 * Three studies: kurtosis of the clipped signal, and Hellinger/KL distance
 * between the simulated clipping-noise pdf and its two candidate models
 * (the analytic piecewise pdf and an ML Gaussian fit). Grid points run
 * independently: every point derives its random stream from the sweep seed
 * and its own (alpha1, alpha2) coordinates, never from the iteration index,
 * so results are invariant under grid reordering and safe to compute
 * concurrently. CLIPNOISE_THREADS caps the worker count (0 or unset: one
 * per hardware thread).
 */

#include <atomic>
#include <bit>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "clipnoise/bussgang.hpp"
#include "clipnoise/clipper.hpp"
#include "clipnoise/noise_model.hpp"
#include "clipnoise/signal_chain.hpp"
#include "clipnoise/stats.hpp"
#include "clipnoise/version.hpp"

namespace clipnoise {

/// Parameters of one sweep run. An empty alpha2_grid selects the diagonal
/// sweep alpha2 = alpha1; otherwise the grid is the full cartesian product.
struct SweepSpec {
  std::vector<double> alpha1_grid;
  std::vector<double> alpha2_grid;  // empty: diagonal sweep
  std::size_t n = 1024;
  std::size_t frames = 1000;
  int qam_order = 16;
  std::uint64_t seed = 1;
  std::size_t bins = 200;

  std::size_t samples_per_point() const noexcept { return n * frames; }

  std::vector<std::pair<double, double>> points() const {
    std::vector<std::pair<double, double>> pts;
    if (alpha2_grid.empty()) {
      pts.reserve(alpha1_grid.size());
      for (const double a : alpha1_grid) pts.emplace_back(a, a);
    } else {
      pts.reserve(alpha1_grid.size() * alpha2_grid.size());
      for (const double a1 : alpha1_grid) {
        for (const double a2 : alpha2_grid) pts.emplace_back(a1, a2);
      }
    }
    return pts;
  }

  void validate(bool metric_run) const {
    if (alpha1_grid.empty()) {
      throw std::invalid_argument("SweepSpec: alpha1 grid is empty");
    }
    if (n < 64 || (n & (n - 1)) != 0) {
      throw std::invalid_argument("SweepSpec: N must be a power of two >= 64, got " +
                                  std::to_string(n));
    }
    if (frames < 1) {
      throw std::invalid_argument("SweepSpec: need at least one frame");
    }
    if (bins < 2) {
      throw std::invalid_argument("SweepSpec: need at least 2 bins");
    }
    for (const auto& [a1, a2] : points()) {
      ClipConfig::make(a1, a2, 1.0);  // range check only
    }
    QamConstellation::make(qam_order);
    if (metric_run && samples_per_point() < 100000) {
      throw std::invalid_argument("SweepSpec: metric runs need >= 1e5 samples per point, got " +
                                  std::to_string(samples_per_point()));
    }
  }
};

struct RunMetadata {
  std::string tool{kToolName};
  std::string version{kToolVersion};
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::size_t frames = 0;
  std::size_t samples_per_point = 0;
  int qam_order = 0;
  std::size_t bins = 0;
};

struct SweepRow {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::vector<double> values;
  bool flagged = false;  // metric undefined at this point (value is NaN)
};

struct SweepResult {
  std::vector<std::string> columns;  // value column names, after alpha1,alpha2
  std::vector<SweepRow> rows;
  RunMetadata meta;
};

enum class DistanceMetric { hellinger, kl };

namespace detail {

/// Stream seed for one grid point, mixed from the sweep seed and the point
/// coordinates (bit patterns), independent of grid order.
inline std::uint64_t point_seed(std::uint64_t seed, double alpha1, double alpha2) noexcept {
  std::uint64_t s = avalanche64(seed);
  s = avalanche64(s ^ std::bit_cast<std::uint64_t>(alpha1));
  s = avalanche64(s ^ std::bit_cast<std::uint64_t>(alpha2));
  return s;
}

inline unsigned env_thread_cap() noexcept {
  if (const char* env = std::getenv("CLIPNOISE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) return static_cast<unsigned>(v);
  }
  return 0;  // auto
}

/// Runs fn(point_index) over [0, count) on up to `threads` workers.
template <class Fn>
void parallel_points(std::size_t count, unsigned threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (!failed.load(std::memory_order_relaxed)) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          std::scoped_lock lock(error_mutex);
          if (!error) error = std::current_exception();
          failed.store(true, std::memory_order_relaxed);
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

struct ChainSamples {
  std::vector<double> clipped;  // pooled x_c
  std::vector<double> noise;    // pooled z = x_c - beta * x
  double beta = 0.0;
  ClipConfig config;
};

/// Runs the full transmitter chain at one grid point and pools the clipped
/// samples and clipping noise across frames.
inline ChainSamples simulate_point(double alpha1, double alpha2, const SweepSpec& spec) {
  const double sigma_x =
      std::sqrt(static_cast<double>(spec.n - 2) / static_cast<double>(spec.n));
  ChainSamples out;
  out.config = ClipConfig::make(alpha1, alpha2, sigma_x);
  out.beta = beta_analytic(out.config);
  FrameGenerator generator(spec.n, QamConstellation::make(spec.qam_order),
                           point_seed(spec.seed, alpha1, alpha2));
  out.clipped.reserve(spec.samples_per_point());
  out.noise.reserve(spec.samples_per_point());
  for (std::size_t i = 0; i < spec.frames; ++i) {
    const TimeFrame frame = generator.frame(i);
    const ClippedFrame clipped = clip_frame(frame, out.config);
    for (std::size_t k = 0; k < clipped.samples.size(); ++k) {
      out.clipped.push_back(clipped.samples[k]);
      out.noise.push_back(clipped.samples[k] - out.beta * frame.samples[k]);
    }
  }
  return out;
}

inline RunMetadata metadata_for(const SweepSpec& spec) {
  RunMetadata meta;
  meta.seed = spec.seed;
  meta.n = spec.n;
  meta.frames = spec.frames;
  meta.samples_per_point = spec.samples_per_point();
  meta.qam_order = spec.qam_order;
  meta.bins = spec.bins;
  return meta;
}

}  // namespace detail

/// Worker count for sweep execution: CLIPNOISE_THREADS if set and positive,
/// otherwise one per hardware thread.
inline unsigned resolve_thread_count() noexcept {
  const unsigned cap = detail::env_thread_cap();
  if (cap > 0) return cap;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Kurtosis of the clipped signal at every grid point.
inline SweepResult kurtosis_sweep(const SweepSpec& spec) {
  spec.validate(false);
  const auto pts = spec.points();
  SweepResult result;
  result.columns = {"kurtosis"};
  result.meta = detail::metadata_for(spec);
  result.rows.resize(pts.size());
  detail::parallel_points(pts.size(), resolve_thread_count(), [&](std::size_t i) {
    const auto [a1, a2] = pts[i];
    const auto chain = detail::simulate_point(a1, a2, spec);
    result.rows[i] = {a1, a2, {kurtosis(chain.clipped)}, false};
  });
  return result;
}

namespace detail {

/// The analytic candidate evaluated as its exact average over each
/// histogram bin, (F(hi) - F(lo)) / width. The piecewise pdf jumps at its
/// region knots, so a bin-center point value can misstate the bin's mass by
/// the jump size; the bin average is the value a histogram of the law
/// estimates.
inline std::vector<double> bin_averaged_pdf(const ClipNoisePdf& model, const EmpiricalPdf& grid) {
  std::vector<double> averaged(grid.bins());
  const double width = grid.width();
  for (std::size_t b = 0; b < grid.bins(); ++b) {
    averaged[b] = model.interval_mass(grid.edges[b], grid.edges[b + 1]) / width;
  }
  return averaged;
}

/// Lookup callable over precomputed per-bin values; evaluating it at a bin
/// center returns that bin's value.
struct BinnedDensity {
  const EmpiricalPdf* grid;
  std::vector<double> values;

  double operator()(double z) const noexcept {
    if (z < grid->edges.front() || z > grid->edges.back()) return 0.0;
    auto b = static_cast<std::size_t>((z - grid->edges.front()) / grid->width());
    if (b >= values.size()) b = values.size() - 1;
    return values[b];
  }
};

}  // namespace detail

/// Hellinger or KL distance between the empirical clipping-noise pdf and
/// the two candidate models g1 (analytic piecewise pdf, compared through
/// its per-bin averages) and g2 (ML Gaussian fit, evaluated at bin
/// centers). Undefined divergences flag the row and store NaN.
inline SweepResult distance_sweep(const SweepSpec& spec, DistanceMetric metric) {
  spec.validate(true);
  const auto pts = spec.points();
  SweepResult result;
  result.columns = metric == DistanceMetric::hellinger
                       ? std::vector<std::string>{"h_g1", "h_g2"}
                       : std::vector<std::string>{"kl_g1", "kl_g2"};
  result.meta = detail::metadata_for(spec);
  result.rows.resize(pts.size());
  detail::parallel_points(pts.size(), resolve_thread_count(), [&](std::size_t i) {
    const auto [a1, a2] = pts[i];
    const auto chain = detail::simulate_point(a1, a2, spec);
    const EmpiricalPdf q = empirical_pdf(chain.noise, spec.bins);
    const ClipNoisePdf g1 = ClipNoisePdf::make(chain.beta, chain.config.a1(), chain.config.a2(),
                                               chain.config.sigma_x);
    const detail::BinnedDensity g1_binned{&q, detail::bin_averaged_pdf(g1, q)};
    const GaussianFit g2 = fit_gaussian_ml(chain.noise);

    SweepRow row{a1, a2, {}, false};
    const auto guard = [&](auto&& compute) {
      try {
        return compute();
      } catch (const DivergenceUndefinedError&) {
        row.flagged = true;
        return std::numeric_limits<double>::quiet_NaN();
      }
    };
    if (metric == DistanceMetric::hellinger) {
      row.values = {guard([&] { return hellinger_distance(q, g1_binned); }),
                    guard([&] { return hellinger_distance(q, [&](double z) { return g2.density(z); }); })};
    } else {
      // The Gaussian fit goes through the log-domain kernel: its density
      // underflows at far bin centers even though it is analytically
      // positive there.
      row.values = {guard([&] { return kl_divergence(q, g1_binned); }),
                    guard([&] { return kl_divergence_log(q, [&](double z) { return g2.log_density(z); }); })};
    }
    result.rows[i] = std::move(row);
  });
  return result;
}

/// Per-bin export of the empirical density and both candidate densities at
/// one grid point.
struct OverlayTable {
  std::vector<double> z;            // bin centers
  std::vector<double> q_empirical;  // histogram density
  std::vector<double> g1_analytic;  // piecewise clipping-noise pdf
  std::vector<double> g2_gaussfit;  // ML Gaussian fit
  double bin_width = 0.0;
  RunMetadata meta;
};

inline OverlayTable pdf_overlay(double alpha1, double alpha2, const SweepSpec& spec) {
  SweepSpec point_spec = spec;
  point_spec.alpha1_grid = {alpha1};
  point_spec.alpha2_grid = {alpha2};
  point_spec.validate(true);

  const auto chain = detail::simulate_point(alpha1, alpha2, point_spec);
  const EmpiricalPdf q = empirical_pdf(chain.noise, spec.bins);
  const ClipNoisePdf g1 = ClipNoisePdf::make(chain.beta, chain.config.a1(), chain.config.a2(),
                                             chain.config.sigma_x);
  const GaussianFit g2 = fit_gaussian_ml(chain.noise);

  OverlayTable table;
  table.meta = detail::metadata_for(point_spec);
  table.bin_width = q.width();
  table.z = q.centers;
  table.q_empirical = q.densities;
  table.g1_analytic = detail::bin_averaged_pdf(g1, q);
  table.g2_gaussfit.reserve(q.bins());
  for (const double c : q.centers) {
    table.g2_gaussfit.push_back(g2.density(c));
  }
  return table;
}

}  // namespace clipnoise

#endif
