#include "pob/epl.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>

#include "pob/ridge.hpp"

namespace pob {

double gamma_p(double a, double x) {
  if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: bad arguments");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) {
    // Series expansion.
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
  }
  // Continued fraction for the upper tail.
  double b = x + 1.0 - a;
  double c = 1e300;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::abs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

double truncated_gaussian_variance(int d, double raw_scale, double l) {
  const double r = l * l / (2.0 * raw_scale * raw_scale);
  const double num = gamma_p(d / 2.0 + 1.0, r);
  const double den = gamma_p(d / 2.0, r);
  return raw_scale * raw_scale * num / den;
}

TruncatedNoise TruncatedNoise::calibrate(int d, double sigma_eps, double l_eps) {
  if (sigma_eps == 0.0) return TruncatedNoise(d, 0.0, l_eps, 0.0);
  if (!(sigma_eps > 0.0) || !(l_eps > 0.0) || sigma_eps > l_eps) {
    throw ConfigError("noise: need 0 <= sigma_eps <= l_eps");
  }
  const double ceiling = l_eps * l_eps / (d + 2.0);
  if (sigma_eps * sigma_eps >= ceiling * (1.0 - 1e-9)) {
    throw ConfigError(
        "noise: covariance floor infeasible; need sigma_eps^2 < l_eps^2/(d+2)");
  }
  const double target = sigma_eps * sigma_eps;
  double lo = sigma_eps;
  double hi = sigma_eps;
  while (truncated_gaussian_variance(d, hi, l_eps) < target) hi *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (truncated_gaussian_variance(d, mid, l_eps) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return TruncatedNoise(d, sigma_eps, l_eps, hi);
}

Vec TruncatedNoise::sample(Rng& rng) const {
  if (raw_scale_ == 0.0) return Vec::Zero(d_);
  Vec eps = rng.normal_vec(d_, raw_scale_);
  while (eps.norm() > l_eps_) eps = rng.normal_vec(d_, raw_scale_);
  return eps;
}

double epl_lhs(const std::vector<Vec>& xs, const std::vector<Vec>& eps, double x0_scale,
               double p) {
  if (xs.size() != eps.size()) {
    throw std::invalid_argument("epl_lhs: context and noise sequences differ in length");
  }
  if (xs.empty()) return 0.0;
  RidgeState design(static_cast<int>(xs[0].size()), x0_scale);
  double sum = 0.0;
  for (std::size_t t = 0; t < xs.size(); ++t) {
    const double q = design.inv_norm(xs[t]);
    sum += std::pow(std::min(1.0, q * q), p);
    design.update(xs[t] + eps[t], 0.0);
  }
  return sum;
}

EplBound epl_rhs(long horizon, double p, double det_ratio_log, double l_eps, double l_x,
                 double sigma_eps, int d, double delta) {
  EplBound out;
  out.term1 = std::pow(2.0, p) * std::pow(static_cast<double>(horizon), 1.0 - p) *
              std::pow(det_ratio_log, p);
  if (l_eps > 0.0) {
    const double c = l_eps * l_eps * (l_eps + l_x) * (l_eps + l_x) /
                     (sigma_eps * sigma_eps * sigma_eps * sigma_eps);
    out.term2 = 8.0 * c * std::log(32.0 * d * c / delta);
  }
  return out;
}

void EplTrialConfig::validate() const {
  if (d <= 0 || horizon <= 0) throw ConfigError("epl: d and horizon must be positive");
  if (p < 0.0 || p > 1.0) throw ConfigError("epl: p must lie in [0, 1]");
  if (!(l_x > 0.0) || !(x0_scale > 0.0)) throw ConfigError("epl: scales must be positive");
  if (sigma_eps < 0.0 || sigma_eps > l_eps) throw ConfigError("epl: need 0 <= sigma_eps <= l_eps");
  if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("epl: delta must lie in (0, 1)");
  if (trials < 100) throw ConfigError("epl: need at least 100 trials");
}

double EplResult::tolerance() const {
  const double p_fail = cfg.delta;
  return p_fail + 3.0 * std::sqrt(p_fail * (1.0 - p_fail) / cfg.trials);
}

EplResult verify_gepl(const EplTrialConfig& cfg) {
  cfg.validate();
  const TruncatedNoise noise = TruncatedNoise::calibrate(cfg.d, cfg.sigma_eps, cfg.l_eps);

  EplResult result;
  result.cfg = cfg;
  double term1_sum = 0.0;
  for (int trial = 0; trial < cfg.trials; ++trial) {
    Rng rng = Rng::derive(cfg.seed, static_cast<std::uint64_t>(trial));
    std::vector<Vec> xs(cfg.horizon);
    std::vector<Vec> eps(cfg.horizon);
    RidgeState noise_free(cfg.d, cfg.x0_scale);
    for (long t = 0; t < cfg.horizon; ++t) {
      xs[t] = rng.sphere(cfg.d, cfg.l_x);
      eps[t] = noise.sample(rng);
      noise_free.update(xs[t], 0.0);
    }
    const double lhs = epl_lhs(xs, eps, cfg.x0_scale, cfg.p);
    const EplBound rhs = epl_rhs(cfg.horizon, cfg.p, noise_free.log_det_ratio(), cfg.l_eps,
                                 cfg.l_x, cfg.sigma_eps, cfg.d, cfg.delta);
    term1_sum += rhs.term1;
    result.term2 = rhs.term2;
    if (lhs > rhs.total()) ++result.failures;
  }
  result.mean_term1 = term1_sum / cfg.trials;
  return result;
}

double PsdResult::slack() const {
  const double p = std::min(std::max(bound, 0.0), 1.0);
  const double var = std::max(p * (1.0 - p), 1.0 / trials);
  return 3.0 * std::sqrt(var / trials);
}

PsdResult verify_psd_dominance(int d, long horizon, double l_x, double sigma_eps, double l_eps,
                               int trials, std::uint64_t seed) {
  if (trials < 100) throw ConfigError("psd: need at least 100 trials");
  const TruncatedNoise noise = TruncatedNoise::calibrate(d, sigma_eps, l_eps);

  PsdResult result;
  result.trials = trials;
  const double exponent = horizon * std::pow(sigma_eps, 4) /
                          (8.0 * l_eps * l_eps * (l_eps + l_x) * (l_eps + l_x));
  result.bound = sigma_eps == 0.0 ? 1.0 : 1.0 - 2.0 * d * std::exp(-exponent);

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(trial));
    Mat diff = Mat::Zero(d, d);
    double scale = 0.0;
    for (long t = 0; t < horizon; ++t) {
      const Vec x = rng.sphere(d, l_x);
      const Vec e = noise.sample(rng);
      const Vec noisy = x + e;
      diff.selfadjointView<Eigen::Lower>().rankUpdate(noisy);
      diff.selfadjointView<Eigen::Lower>().rankUpdate(x, -1.0);
      scale += noisy.squaredNorm() + x.squaredNorm();
    }
    diff.triangularView<Eigen::StrictlyUpper>() =
        diff.triangularView<Eigen::StrictlyLower>().transpose();
    const double lambda_min =
        Eigen::SelfAdjointEigenSolver<Mat>(diff, Eigen::EigenvaluesOnly).eigenvalues()(0);
    if (lambda_min >= -1e-9 * std::max(scale, 1.0)) ++result.holds;
  }
  return result;
}

ScalarTightness scalar_tightness(long horizon, double p) {
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("scalar_tightness: p must lie in [0, 1]");
  if (horizon < 2) throw std::invalid_argument("scalar_tightness: horizon must be at least 2");
  ScalarTightness out;
  for (long t = 1; t <= horizon; ++t) out.lhs += std::pow(static_cast<double>(t), -p);
  out.reference = p == 1.0 ? std::log(static_cast<double>(horizon))
                           : std::pow(static_cast<double>(horizon), 1.0 - p) / (1.0 - p);
  return out;
}

std::string epl_csv_header() {
  return "d,T,p,sigma_eps,l_eps,l_x,delta,trials,failures,bound_term1,bound_term2";
}

std::string epl_csv_row(const EplResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%d,%ld,%.9g,%.9g,%.9g,%.9g,%.9g,%d,%d,%.9g,%.9g",
                r.cfg.d, r.cfg.horizon, r.cfg.p, r.cfg.sigma_eps, r.cfg.l_eps, r.cfg.l_x,
                r.cfg.delta, r.cfg.trials, r.failures, r.mean_term1, r.term2);
  return buf;
}

}  // namespace pob
