#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pob/rng.hpp"
#include "pob/types.hpp"

namespace pob {

/// Bounded isotropic noise with an exact covariance floor: per-coordinate
/// Gaussian with a raw scale calibrated so that, after rejecting draws with
/// |eps| > l_eps, E[eps eps'] equals sigma_eps^2 * I. Calibration solves the
/// truncated-variance identity with the chi-square CDF; it fails (throws)
/// when sigma_eps^2 >= l_eps^2 / (d + 2), where no raw scale can compensate
/// for the truncation loss.
class TruncatedNoise {
 public:
  static TruncatedNoise calibrate(int d, double sigma_eps, double l_eps);

  [[nodiscard]] Vec sample(Rng& rng) const;
  [[nodiscard]] double raw_scale() const { return raw_scale_; }
  [[nodiscard]] double sigma_eps() const { return sigma_eps_; }
  [[nodiscard]] double l_eps() const { return l_eps_; }

 private:
  TruncatedNoise(int d, double sigma_eps, double l_eps, double raw_scale)
      : d_(d), sigma_eps_(sigma_eps), l_eps_(l_eps), raw_scale_(raw_scale) {}

  int d_;
  double sigma_eps_;
  double l_eps_;
  double raw_scale_;
};

/// Regularized lower incomplete gamma P(a, x); exposed for tests.
double gamma_p(double a, double x);

/// Per-coordinate variance of N(0, s^2 I_d) conditioned on the ball of
/// radius l; exposed for tests.
double truncated_gaussian_variance(int d, double raw_scale, double l);

/// Sum over rounds of min(1, |x_t|^2 in the inverse of the noisy running
/// design matrix)^p. The design matrix absorbs x_t + eps_t; the queried
/// vector is the noise-free x_t against the previous round's matrix.
double epl_lhs(const std::vector<Vec>& xs, const std::vector<Vec>& eps, double x0_scale,
               double p);

struct EplBound {
  double term1 = 0.0;  // 2^p * T^(1-p) * det_ratio_log^p
  double term2 = 0.0;  // horizon-free noise constant; zero when l_eps == 0
  [[nodiscard]] double total() const { return term1 + term2; }
};

/// Two-term high-probability bound matched against epl_lhs. det_ratio_log is
/// log(det X_T / det X_0) of the noise-free design matrix.
EplBound epl_rhs(long horizon, double p, double det_ratio_log, double l_eps, double l_x,
                 double sigma_eps, int d, double delta);

struct EplTrialConfig {
  int d = 2;
  long horizon = 500;
  double p = 1.0;
  double l_x = 1.0;
  double l_eps = 2.0;
  double sigma_eps = 0.5;
  double x0_scale = 1.0;
  double delta = 0.05;
  int trials = 200;
  std::uint64_t seed = 1;

  void validate() const;
};

struct EplResult {
  EplTrialConfig cfg;
  int failures = 0;
  double mean_term1 = 0.0;
  double term2 = 0.0;

  [[nodiscard]] double failure_fraction() const {
    return static_cast<double>(failures) / cfg.trials;
  }
  /// delta plus three-sigma binomial slack at the trial count.
  [[nodiscard]] double tolerance() const;
};

/// Monte Carlo check of the noisy potential inequality: contexts uniform on
/// the sphere of radius l_x, calibrated truncated noise, one failure per
/// trial with lhs above the bound.
EplResult verify_gepl(const EplTrialConfig& cfg);

struct PsdResult {
  int trials = 0;
  int holds = 0;
  double bound = 0.0;  // may be negative (vacuous) for harsh noise setups
  [[nodiscard]] double empirical() const {
    return static_cast<double>(holds) / trials;
  }
  /// Three-sigma binomial slack for the empirical-vs-bound comparison.
  [[nodiscard]] double slack() const;
  [[nodiscard]] bool passes() const { return empirical() >= std::max(0.0, bound - slack()); }
};

/// Frequency with which the noisy outer-product sum dominates the noise-free
/// one in the PSD order, against the matrix-concentration lower bound
/// 1 - 2d * exp(-T * sigma^4 / (8 l_eps^2 (l_eps + l_x)^2)).
PsdResult verify_psd_dominance(int d, long horizon, double l_x, double sigma_eps, double l_eps,
                               int trials, std::uint64_t seed);

struct ScalarTightness {
  double lhs = 0.0;        // sum of t^-p
  double reference = 0.0;  // T^(1-p)/(1-p), or log T at p == 1
  [[nodiscard]] double ratio() const { return lhs / reference; }
};

/// The scalar sequence x_t = 1 that makes the clamped-power sum equal
/// sum t^-p; its growth must track the closed-form rate within a factor 2.
ScalarTightness scalar_tightness(long horizon, double p);

std::string epl_csv_header();
std::string epl_csv_row(const EplResult& result);

}  // namespace pob
