#include <catch2/catch.hpp>

#include <cstdlib>
#include <vector>

#include "clipnoise/experiments.hpp"

using namespace clipnoise;

namespace {

SweepSpec desk_spec() {
  SweepSpec spec;
  spec.alpha1_grid = {0.5, 1.0};
  spec.alpha2_grid = {2.0};
  spec.n = 256;
  spec.frames = 600;  // ~1.5e5 samples per point
  spec.qam_order = 16;
  spec.seed = 7;
  spec.bins = 100;
  return spec;
}

}  // namespace

TEST_CASE("sweep results are deterministic", "[experiments]") {
  const auto spec = desk_spec();
  const auto a = distance_sweep(spec, DistanceMetric::hellinger);
  const auto b = distance_sweep(spec, DistanceMetric::hellinger);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].alpha1 == b.rows[i].alpha1);
    CHECK(a.rows[i].alpha2 == b.rows[i].alpha2);
    REQUIRE(a.rows[i].values.size() == b.rows[i].values.size());
    for (std::size_t v = 0; v < a.rows[i].values.size(); ++v) {
      CHECK(a.rows[i].values[v] == b.rows[i].values[v]);  // bit identical
    }
  }
}

TEST_CASE("rows cover the full grid in order", "[experiments]") {
  SweepSpec spec = desk_spec();
  spec.alpha1_grid = {0.5, 1.0, 1.5};
  spec.alpha2_grid = {2.0, 3.0};
  spec.frames = 500;
  const auto result = kurtosis_sweep(spec);
  REQUIRE(result.rows.size() == 6);
  CHECK(result.rows[0].alpha1 == 0.5);
  CHECK(result.rows[0].alpha2 == 2.0);
  CHECK(result.rows[1].alpha2 == 3.0);
  CHECK(result.rows[5].alpha1 == 1.5);

  spec.alpha2_grid.clear();  // diagonal
  const auto diag = kurtosis_sweep(spec);
  REQUIRE(diag.rows.size() == 3);
  for (const auto& row : diag.rows) CHECK(row.alpha1 == row.alpha2);
}

TEST_CASE("grid points do not depend on grid order", "[experiments]") {
  SweepSpec forward = desk_spec();
  forward.alpha1_grid = {0.5, 1.0};
  SweepSpec reversed = forward;
  reversed.alpha1_grid = {1.0, 0.5};
  const auto a = distance_sweep(forward, DistanceMetric::kl);
  const auto b = distance_sweep(reversed, DistanceMetric::kl);
  CHECK(a.rows[0].values == b.rows[1].values);
  CHECK(a.rows[1].values == b.rows[0].values);
}

TEST_CASE("kurtosis trend: wide bounds stay Gaussian, tight bounds do not", "[experiments]") {
  SweepSpec spec;
  spec.alpha1_grid = {1.0, 4.0};
  spec.n = 256;
  spec.frames = 2000;
  spec.seed = 11;
  const auto result = kurtosis_sweep(spec);
  const double tight = result.rows[0].values[0];
  const double wide = result.rows[1].values[0];
  CHECK(std::abs(wide - 3.0) < std::abs(tight - 3.0));
  CHECK(std::abs(wide - 3.0) < 0.1);
  CHECK(std::abs(tight - 3.0) > 0.5);
}

TEST_CASE("analytic pdf outperforms the Gaussian fit at small alpha1", "[experiments]") {
  const auto spec = desk_spec();
  const auto h = distance_sweep(spec, DistanceMetric::hellinger);
  for (const auto& row : h.rows) {
    CHECK_FALSE(row.flagged);
    CHECK(row.values[0] < row.values[1]);  // h_g1 < h_g2
    CHECK(row.values[0] < 0.05);
    CHECK(row.values[0] >= 0.0);
    CHECK(row.values[1] <= 1.0);
  }
  const auto kl = distance_sweep(spec, DistanceMetric::kl);
  for (const auto& row : kl.rows) {
    CHECK_FALSE(row.flagged);
    CHECK(row.values[0] < row.values[1]);
    CHECK(row.values[0] >= -1e-9);
  }
}

TEST_CASE("Gaussian fit diverges at a large lower bound with a tight upper bound",
          "[experiments]") {
  SweepSpec spec = desk_spec();
  spec.alpha1_grid = {5.0};
  spec.n = 1024;
  spec.frames = 1000;  // ~1e6 samples
  spec.bins = 200;
  const auto kl = distance_sweep(spec, DistanceMetric::kl);
  REQUIRE(kl.rows.size() == 1);
  CHECK_FALSE(kl.rows[0].flagged);
  CHECK(kl.rows[0].values[1] > 2.0 * kl.rows[0].values[0]);
}

TEST_CASE("pdf overlay columns are consistent", "[experiments]") {
  SweepSpec spec = desk_spec();
  spec.n = 1024;
  spec.frames = 1000;
  spec.bins = 200;
  const auto table = pdf_overlay(1.0, 1.0, spec);
  REQUIRE(table.z.size() == 200);
  double q_mass = 0.0;
  double g1_mass = 0.0;
  for (std::size_t b = 0; b < table.z.size(); ++b) {
    CHECK(table.q_empirical[b] >= 0.0);
    CHECK(table.g1_analytic[b] >= 0.0);
    CHECK(table.g2_gaussfit[b] >= 0.0);
    q_mass += table.q_empirical[b] * table.bin_width;
    g1_mass += table.g1_analytic[b] * table.bin_width;
  }
  CHECK(q_mass == Approx(1.0).margin(1e-12));
  CHECK(g1_mass == Approx(1.0).margin(1e-3));
}

TEST_CASE("overlay is deterministic", "[experiments]") {
  SweepSpec spec = desk_spec();
  const auto a = pdf_overlay(1.0, 2.0, spec);
  const auto b = pdf_overlay(1.0, 2.0, spec);
  CHECK(a.z == b.z);
  CHECK(a.q_empirical == b.q_empirical);
  CHECK(a.g1_analytic == b.g1_analytic);
  CHECK(a.g2_gaussfit == b.g2_gaussfit);
}

TEST_CASE("spec validation rejects bad parameters", "[experiments]") {
  SweepSpec spec = desk_spec();
  spec.alpha1_grid.clear();
  CHECK_THROWS_AS(spec.validate(false), std::invalid_argument);

  spec = desk_spec();
  spec.n = 100;  // not a power of two
  CHECK_THROWS_AS(spec.validate(false), std::invalid_argument);

  spec = desk_spec();
  spec.frames = 0;
  CHECK_THROWS_AS(spec.validate(false), std::invalid_argument);

  spec = desk_spec();
  spec.alpha1_grid = {7.0};  // out of operational range
  CHECK_THROWS_AS(spec.validate(false), std::invalid_argument);

  spec = desk_spec();
  spec.qam_order = 10;
  CHECK_THROWS_AS(spec.validate(false), std::invalid_argument);

  // metric runs need at least 1e5 samples per point
  spec = desk_spec();
  spec.frames = 100;  // 25600 samples
  CHECK_THROWS_AS(spec.validate(true), std::invalid_argument);
  CHECK_NOTHROW(spec.validate(false));
  CHECK_THROWS_AS(distance_sweep(spec, DistanceMetric::hellinger), std::invalid_argument);
}

TEST_CASE("thread count resolution honors the environment cap", "[experiments]") {
  setenv("CLIPNOISE_THREADS", "3", 1);
  CHECK(resolve_thread_count() == 3);
  setenv("CLIPNOISE_THREADS", "0", 1);
  CHECK(resolve_thread_count() >= 1);
  unsetenv("CLIPNOISE_THREADS");
  CHECK(resolve_thread_count() >= 1);
}

TEST_CASE("results are identical under a single-thread cap", "[experiments]") {
  const auto spec = desk_spec();
  const auto parallel = kurtosis_sweep(spec);
  setenv("CLIPNOISE_THREADS", "1", 1);
  const auto serial = kurtosis_sweep(spec);
  unsetenv("CLIPNOISE_THREADS");
  REQUIRE(parallel.rows.size() == serial.rows.size());
  for (std::size_t i = 0; i < parallel.rows.size(); ++i) {
    CHECK(parallel.rows[i].values == serial.rows[i].values);
  }
}
