#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "clipnoise/rng.hpp"
#include "clipnoise/stats.hpp"
#include "oracle.hpp"

using namespace clipnoise;

namespace {

std::vector<double> normal_draws(std::size_t n, double mu, double sigma, std::uint64_t seed) {
  NormalSampler normal(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = mu + sigma * normal.next();
  return x;
}

std::vector<double> uniform_draws(std::size_t n, double lo, double hi, std::uint64_t seed) {
  Splitmix64 rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = lo + (hi - lo) * rng.next_unit();
  return x;
}

/// Histogram with exact Gaussian bin masses instead of sampled counts.
EmpiricalPdf exact_gaussian_histogram(double mu, double sigma, double lo, double hi,
                                      std::size_t bins) {
  const auto cdf = [&](double x) {
    return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2));
  };
  EmpiricalPdf q;
  const double width = (hi - lo) / static_cast<double>(bins);
  q.count = bins;
  q.edges.resize(bins + 1);
  q.centers.resize(bins);
  q.densities.resize(bins);
  double mass = 0.0;
  for (std::size_t b = 0; b <= bins; ++b) q.edges[b] = lo + static_cast<double>(b) * width;
  for (std::size_t b = 0; b < bins; ++b) {
    q.centers[b] = lo + (static_cast<double>(b) + 0.5) * width;
    q.densities[b] = (cdf(q.edges[b + 1]) - cdf(q.edges[b])) / width;
    mass += q.densities[b] * width;
  }
  for (auto& d : q.densities) d /= mass;  // fold the truncated tails back in
  return q;
}

}  // namespace

TEST_CASE("kurtosis of reference distributions", "[stats]") {
  CHECK(kurtosis(normal_draws(10000000, 0.0, 1.0, 17)) == Approx(3.0).margin(0.05));
  CHECK(kurtosis(uniform_draws(10000000, -1.0, 1.0, 18)) == Approx(1.8).margin(0.02));
  const std::vector<double> two_point = {-1.0, 1.0, -1.0, 1.0};
  CHECK(kurtosis(two_point) == 1.0);
}

TEST_CASE("kurtosis is shift and scale invariant", "[stats]") {
  const auto x = normal_draws(1000, 0.5, 2.0, 23);
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = 2.5 * x[i] - 3.0;
  CHECK(kurtosis(y) == Approx(kurtosis(x)).epsilon(1e-12));
}

TEST_CASE("kurtosis rejects degenerate inputs", "[stats]") {
  CHECK_THROWS_AS(kurtosis(std::vector<double>{1.0, 2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(kurtosis(std::vector<double>(10, 4.2)), std::invalid_argument);
}

TEST_CASE("ML Gaussian fit", "[stats]") {
  const auto fit = fit_gaussian_ml(std::vector<double>{0.0, 2.0});
  CHECK(fit.mu == Approx(1.0).margin(1e-15));
  CHECK(fit.sigma == Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(fit_gaussian_ml(std::vector<double>(5, 3.0)), std::invalid_argument);
  CHECK_THROWS_AS(fit_gaussian_ml(std::vector<double>{1.0}), std::invalid_argument);

  const auto sampled = fit_gaussian_ml(normal_draws(1000000, 3.0, 2.0, 29));
  CHECK(sampled.mu == Approx(3.0).margin(0.01));
  CHECK(sampled.sigma == Approx(2.0).margin(0.01));
}

TEST_CASE("Gaussian fit density and log density agree", "[stats]") {
  const GaussianFit fit{0.4, 1.7};
  for (const double z : {-3.0, 0.0, 0.4, 5.0}) {
    CHECK(std::log(fit.density(z)) == Approx(fit.log_density(z)).margin(1e-12));
  }
  // far from the mode the density underflows but the log stays finite
  CHECK(GaussianFit{0.0, 0.01}.density(10.0) == 0.0);
  CHECK(std::isfinite(GaussianFit{0.0, 0.01}.log_density(10.0)));
}

TEST_CASE("histogram of uniform draws is flat with unit mass", "[stats]") {
  const auto q = empirical_pdf(uniform_draws(1000000, 0.0, 1.0, 31), 100);
  double mass = 0.0;
  for (const double d : q.densities) {
    CHECK(d == Approx(1.0).margin(0.05));
    mass += d * q.width();
  }
  CHECK(mass == Approx(1.0).margin(1e-12));
}

TEST_CASE("histogram peak of the standard normal", "[stats]") {
  const auto q = empirical_pdf(normal_draws(10000000, 0.0, 1.0, 37), 200);
  // phi(0) = 0.3989..., pinned against the quadrature oracle: the density
  // integrates to 1, so the peak equals 1/integral of exp(-x^2/2) scaled
  const double phi0 = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  CHECK(oracle::std_normal_pdf(0.0) == Approx(phi0).margin(1e-15));
  CHECK(q.density_at(0.0) == Approx(phi0).margin(0.01));
}

TEST_CASE("histogram respects a caller-supplied range", "[stats]") {
  std::vector<double> samples(200, 0.5);
  for (std::size_t i = 0; i < 100; ++i) samples[i] = 5.0;  // outside
  const auto q = empirical_pdf(samples, 10, 0.0, 1.0);
  CHECK(q.count == 100);
  double mass = 0.0;
  for (const double d : q.densities) mass += d * q.width();
  CHECK(mass == Approx(1.0).margin(1e-12));
}

TEST_CASE("histogram input validation", "[stats]") {
  CHECK_THROWS_AS(empirical_pdf(std::vector<double>(50, 1.0), 10), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pdf(std::vector<double>(200, 1.0), 10), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pdf(uniform_draws(200, 0.0, 1.0, 3), 0), std::invalid_argument);
  CHECK_THROWS_AS(empirical_pdf(uniform_draws(200, 0.0, 1.0, 3), 10, 2.0, 1.0),
                  std::invalid_argument);
}

TEST_CASE("Hellinger distance of a sample against its own law", "[stats]") {
  const auto q = empirical_pdf(normal_draws(10000000, 0.0, 1.0, 41), 200);
  const double h = hellinger_distance(q, [](double z) { return oracle::std_normal_pdf(z); });
  CHECK(h >= 0.0);
  CHECK(h < 0.02);
}

TEST_CASE("Hellinger distance between two Gaussians matches the closed form", "[stats]") {
  const auto q = exact_gaussian_histogram(0.0, 1.0, -9.0, 10.0, 2000);
  const GaussianFit g{1.0, 1.0};
  const double h = hellinger_distance(q, [&](double z) { return g.density(z); });
  const double expected = oracle::gaussian_hellinger(0.0, 1.0, 1.0, 1.0);
  CHECK(expected == Approx(std::sqrt(1.0 - std::exp(-1.0 / 8.0))).margin(1e-12));
  CHECK(h == Approx(0.3428).margin(0.01));
  CHECK(h == Approx(expected).margin(0.01));
}

TEST_CASE("Hellinger edge cases", "[stats]") {
  const auto q = empirical_pdf(uniform_draws(1000, 0.0, 1.0, 43), 20);
  CHECK(hellinger_distance(q, [](double) { return 0.0; }) == 1.0);
  CHECK_THROWS_AS(hellinger_distance(q, [](double) { return -0.1; }), std::invalid_argument);
  // agreement on all bins means zero distance
  CHECK(hellinger_distance(q, [&](double z) { return q.density_at(z); }) ==
        Approx(0.0).margin(1e-9));
}

TEST_CASE("KL divergence of a sample against its own law", "[stats]") {
  const auto q = empirical_pdf(normal_draws(10000000, 0.0, 1.0, 47), 200);
  const double d = kl_divergence(q, [](double z) { return oracle::std_normal_pdf(z); });
  CHECK(d >= -1e-9);
  CHECK(d < 0.005);
  // against itself the divergence vanishes identically
  CHECK(kl_divergence(q, [&](double z) { return q.density_at(z); }) ==
        Approx(0.0).margin(1e-12));
}

TEST_CASE("KL divergence between Gaussians matches the closed forms", "[stats]") {
  const auto q = exact_gaussian_histogram(0.0, 1.0, -9.0, 10.0, 2000);

  const GaussianFit shifted{1.0, 1.0};
  const double d_shift = kl_divergence(q, [&](double z) { return shifted.density(z); });
  CHECK(oracle::gaussian_kl(0.0, 1.0, 1.0, 1.0) == Approx(0.5).margin(1e-12));
  CHECK(d_shift == Approx(0.5).margin(0.02));

  const GaussianFit widened{0.0, 2.0};
  const double d_wide = kl_divergence(q, [&](double z) { return widened.density(z); });
  const double expected = std::log(2.0) + 1.0 / 8.0 - 0.5;
  CHECK(oracle::gaussian_kl(0.0, 1.0, 0.0, 2.0) == Approx(expected).margin(1e-12));
  CHECK(d_wide == Approx(expected).margin(0.02));
}

TEST_CASE("KL divergence error handling and zero-bin convention", "[stats]") {
  // empty bins contribute nothing: a support gap in q is fine
  std::vector<double> gap;
  for (std::size_t i = 0; i < 500; ++i) gap.push_back(static_cast<double>(i % 2) * 3.0);
  const auto q = empirical_pdf(gap, 30);  // middle bins empty
  CHECK_NOTHROW(kl_divergence(q, [](double) { return 0.5; }));

  // vanishing candidate on a populated bin is undefined
  CHECK_THROWS_AS(kl_divergence(q, [](double z) { return z < 1.0 ? 0.5 : 0.0; }),
                  DivergenceUndefinedError);
  CHECK_THROWS_AS(
      kl_divergence_log(q,
                        [](double z) {
                          return z < 1.0 ? -1.0 : -std::numeric_limits<double>::infinity();
                        }),
      DivergenceUndefinedError);
}

TEST_CASE("log-domain KL agrees with the plain kernel when both apply", "[stats]") {
  const auto q = empirical_pdf(normal_draws(100000, 0.0, 1.0, 53), 100);
  const GaussianFit g{0.3, 1.2};
  const double plain = kl_divergence(q, [&](double z) { return g.density(z); });
  const double logd = kl_divergence_log(q, [&](double z) { return g.log_density(z); });
  CHECK(plain == Approx(logd).margin(1e-12));
}

TEST_CASE("dense-grid metric kernels match the closed forms", "[stats]") {
  // two parameter pairs, both metrics, 1e-4 agreement
  for (const auto& [mu2, s2] : {std::pair{1.0, 1.0}, {0.0, 2.0}}) {
    const GaussianFit g{mu2, s2};
    const auto q = discretize_density([](double z) { return oracle::std_normal_pdf(z); },
                                      -12.0, 13.0, 20000);
    const double h = hellinger_distance(q, [&](double z) { return g.density(z); });
    const double d = kl_divergence(q, [&](double z) { return g.density(z); });
    CHECK(h == Approx(oracle::gaussian_hellinger(0.0, 1.0, mu2, s2)).margin(1e-4));
    CHECK(d == Approx(oracle::gaussian_kl(0.0, 1.0, mu2, s2)).margin(1e-4));
  }
}

TEST_CASE("KS statistic against the matching and a shifted cdf", "[stats]") {
  const auto x = normal_draws(100000, 0.0, 1.0, 59);
  const auto cdf = [](double v) { return 0.5 * std::erfc(-v / std::numbers::sqrt2); };
  CHECK(ks_statistic(x, cdf) < 0.005);
  const auto shifted = [](double v) { return 0.5 * std::erfc(-(v - 0.5) / std::numbers::sqrt2); };
  CHECK(ks_statistic(x, shifted) > 0.1);
  CHECK_THROWS_AS(ks_statistic(std::vector<double>{}, cdf), std::invalid_argument);
}
