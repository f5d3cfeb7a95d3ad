#include <doctest.h>

#include <cmath>

#include "pob/epl.hpp"
#include "pob/rng.hpp"

using pob::EplBound;
using pob::EplTrialConfig;
using pob::Rng;
using pob::TruncatedNoise;
using pob::Vec;

namespace {

std::vector<Vec> ones(int n) { return std::vector<Vec>(n, Vec::Constant(1, 1.0)); }
std::vector<Vec> zeros(int n) { return std::vector<Vec>(n, Vec::Zero(1)); }

}  // namespace

TEST_CASE("clamped potential sum on the scalar unit sequence") {
  CHECK(pob::epl_lhs(ones(3), zeros(3), 1.0, 1.0) == doctest::Approx(11.0 / 6.0));
  CHECK(pob::epl_lhs(ones(3), zeros(3), 1.0, 0.0) == doctest::Approx(3.0));
  CHECK(pob::epl_lhs(ones(2), zeros(2), 1.0, 0.5) ==
        doctest::Approx(1.0 + 1.0 / std::sqrt(2.0)));
}

TEST_CASE("every potential summand lies in [0, 1]") {
  Rng rng(17);
  const int d = 3;
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<Vec> xs;
    std::vector<Vec> eps;
    for (int t = 0; t < 30; ++t) {
      xs.push_back(rng.sphere(d, 3.0));
      eps.push_back(rng.uniform_box(d, 0.2));
    }
    const double at_p1 = pob::epl_lhs(xs, eps, 0.5, 1.0);
    const double at_p0 = pob::epl_lhs(xs, eps, 0.5, 0.0);
    CHECK(at_p1 >= 0.0);
    CHECK(at_p1 <= at_p0 + 1e-12);  // each term <= 1 implies sum <= T
    CHECK(at_p0 == doctest::Approx(30.0));
  }
}

TEST_CASE("potential sum shrinks when the initial matrix grows") {
  Rng rng(18);
  std::vector<Vec> xs;
  std::vector<Vec> eps;
  for (int t = 0; t < 40; ++t) {
    xs.push_back(rng.sphere(2, 1.0));
    eps.push_back(rng.uniform_box(2, 0.1));
  }
  double prev = pob::epl_lhs(xs, eps, 0.25, 0.7);
  for (double scale : {0.5, 1.0, 2.0, 4.0, 16.0}) {
    const double cur = pob::epl_lhs(xs, eps, scale, 0.7);
    CHECK(cur <= prev + 1e-12);
    prev = cur;
  }
}

TEST_CASE("bound arithmetic") {
  // p = 1, zero noise: the classical 2 log det ratio.
  const EplBound classic = pob::epl_rhs(3, 1.0, std::log(4.0), 0.0, 1.0, 0.0, 1, 0.1);
  CHECK(classic.term1 == doctest::Approx(2.0 * std::log(4.0)));
  CHECK(classic.term2 == 0.0);
  CHECK(classic.total() == doctest::Approx(2.7726).epsilon(1e-4));

  // p = 0: the first term is T regardless of the determinant.
  const EplBound flat = pob::epl_rhs(7, 0.0, std::log(9.0), 0.0, 1.0, 0.0, 2, 0.1);
  CHECK(flat.term1 == doctest::Approx(7.0));

  // Printed constant at d=1, l_eps = l_x = sigma = 1, delta = 0.1.
  const EplBound noisy = pob::epl_rhs(10, 1.0, 0.0, 1.0, 1.0, 1.0, 1, 0.1);
  CHECK(noisy.term2 == doctest::Approx(32.0 * std::log(1280.0)));
  CHECK(noisy.term2 == doctest::Approx(229.0).epsilon(1e-3));
}

TEST_CASE("incomplete gamma agrees with known chi-square values") {
  // P(chi2_2 <= x) = 1 - exp(-x/2).
  for (double x : {0.5, 1.0, 2.0, 5.0}) {
    CHECK(pob::gamma_p(1.0, x / 2.0) == doctest::Approx(1.0 - std::exp(-x / 2.0)).epsilon(1e-12));
  }
  // P(chi2_1 <= 1) = erf(1/sqrt(2)).
  CHECK(pob::gamma_p(0.5, 0.5) == doctest::Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-12));
}

TEST_CASE("truncated noise is calibrated to the exact covariance floor") {
  const int d = 2;
  const double sigma = 0.5;
  const double l = 2.0;
  const TruncatedNoise noise = TruncatedNoise::calibrate(d, sigma, l);
  CHECK(noise.raw_scale() >= sigma);
  CHECK(pob::truncated_gaussian_variance(d, noise.raw_scale(), l) ==
        doctest::Approx(sigma * sigma).epsilon(1e-9));

  Rng rng(19);
  const int n = 200000;
  pob::Mat cov = pob::Mat::Zero(d, d);
  for (int i = 0; i < n; ++i) {
    const Vec e = noise.sample(rng);
    CHECK(e.norm() <= l + 1e-12);
    cov += e * e.transpose();
  }
  cov /= n;
  // Per-coordinate variance near sigma^2, cross terms near zero.
  const double se = sigma * sigma * std::sqrt(2.0 / n) * 3.0;
  CHECK(std::abs(cov(0, 0) - sigma * sigma) <= 3.0 * se);
  CHECK(std::abs(cov(1, 1) - sigma * sigma) <= 3.0 * se);
  CHECK(std::abs(cov(0, 1)) <= 3.0 * se);

  // Infeasible floor: the ball cannot carry that much variance.
  CHECK_THROWS_AS(TruncatedNoise::calibrate(4, 1.0, 2.0), pob::ConfigError);
}

TEST_CASE("zero-noise potential check never fails") {
  EplTrialConfig cfg;
  cfg.d = 3;
  cfg.horizon = 200;
  cfg.p = 1.0;
  cfg.l_x = 1.0;
  cfg.l_eps = 0.0;
  cfg.sigma_eps = 0.0;
  cfg.trials = 100;
  cfg.seed = 5;
  for (double p : {0.0, 0.5, 1.0}) {
    cfg.p = p;
    const auto result = pob::verify_gepl(cfg);
    CHECK(result.failures == 0);
    CHECK(result.term2 == 0.0);
  }
}

TEST_CASE("noisy potential check stays within the failure budget") {
  EplTrialConfig cfg;
  cfg.d = 2;
  cfg.horizon = 300;
  cfg.p = 1.0;
  cfg.l_x = 1.0;
  cfg.l_eps = 2.0;
  cfg.sigma_eps = 0.5;
  cfg.delta = 0.05;
  cfg.trials = 100;
  cfg.seed = 6;
  const auto at_p1 = pob::verify_gepl(cfg);
  CHECK(at_p1.failure_fraction() <= at_p1.tolerance());
  cfg.p = 0.5;
  const auto at_half = pob::verify_gepl(cfg);
  CHECK(at_half.failure_fraction() <= at_half.tolerance());
}

TEST_CASE("psd dominance with zero noise holds with frequency one") {
  const auto result = pob::verify_psd_dominance(2, 50, 1.0, 0.0, 0.0, 100, 3);
  CHECK(result.empirical() == doctest::Approx(1.0));
  CHECK(result.bound == doctest::Approx(1.0));
  CHECK(result.passes());
}

TEST_CASE("psd dominance beats the printed bound") {
  // Vacuous-bound regime quoted with l_eps = 4.
  const auto vacuous = pob::verify_psd_dominance(2, 2000, 1.0, 1.0, 4.0, 100, 9);
  CHECK(vacuous.bound == doctest::Approx(1.0 - 4.0 * std::exp(-0.625)).epsilon(1e-9));
  CHECK(vacuous.passes());  // bound is negative; any frequency clears it

  // Informative regime.
  const auto tight = pob::verify_psd_dominance(2, 2000, 1.0, 1.0, 2.5, 150, 10);
  CHECK(tight.bound > 0.8);
  CHECK(tight.empirical() >= tight.bound - tight.slack());

  // Tiny horizon with strong noise: the requirement degrades to max(0, ...).
  const auto tiny = pob::verify_psd_dominance(2, 1, 1.0, 1.0, 2.5, 100, 11);
  CHECK(tiny.passes());
}

TEST_CASE("scalar rate comparison") {
  const auto harmonic = pob::scalar_tightness(100, 1.0);
  CHECK(harmonic.lhs == doctest::Approx(5.187).epsilon(1e-3));
  CHECK(harmonic.reference == doctest::Approx(std::log(100.0)));
  CHECK(harmonic.ratio() >= 0.5);
  CHECK(harmonic.ratio() <= 2.0);

  const auto flat = pob::scalar_tightness(1000, 0.0);
  CHECK(flat.lhs == doctest::Approx(1000.0));

  const auto sqrt_rate = pob::scalar_tightness(10000, 0.5);
  CHECK(sqrt_rate.lhs == doctest::Approx(2.0 * std::sqrt(10000.0)).epsilon(0.02));
  CHECK(sqrt_rate.ratio() >= 0.5);
  CHECK(sqrt_rate.ratio() <= 2.0);

  CHECK_THROWS_AS(pob::scalar_tightness(100, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(pob::scalar_tightness(1, 0.5), std::invalid_argument);
}

TEST_CASE("csv row layout") {
  EplTrialConfig cfg;
  cfg.trials = 100;
  pob::EplResult result;
  result.cfg = cfg;
  result.failures = 3;
  result.mean_term1 = 12.5;
  result.term2 = 100.25;
  CHECK(pob::epl_csv_header() ==
        "d,T,p,sigma_eps,l_eps,l_x,delta,trials,failures,bound_term1,bound_term2");
  CHECK(pob::epl_csv_row(result) == "2,500,1,0.5,2,1,0.05,100,3,12.5,100.25");
}

TEST_CASE("trial config validation") {
  EplTrialConfig cfg;
  cfg.trials = 50;
  CHECK_THROWS_AS(cfg.validate(), pob::ConfigError);
  cfg.trials = 100;
  cfg.p = 1.5;
  CHECK_THROWS_AS(cfg.validate(), pob::ConfigError);
  cfg.p = 1.0;
  cfg.sigma_eps = 3.0;  // above l_eps
  CHECK_THROWS_AS(cfg.validate(), pob::ConfigError);
}
