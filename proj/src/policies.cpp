#include "pob/policies.hpp"

#include <cmath>

namespace pob {

void PolicyConfig::validate() const {
  if (!(lambda > 0.0)) throw ConfigError("policy: lambda must be positive");
  if (!(delta > 0.0) || delta >= 1.0) throw ConfigError("policy: delta must lie in (0, 1)");
  if (r_eta < 0.0) throw ConfigError("policy: r_eta must be nonnegative");
  if (!(l_u > 0.0)) throw ConfigError("policy: l_u must be positive");
  if (l_eps < 0.0) throw ConfigError("policy: l_eps must be nonnegative");
  if (horizon < 0) throw ConfigError("policy: horizon must be nonnegative");
}

double zeta(double lambda, double delta, double r_eta, double l_u, long pulls, int d_u) {
  const double log_term = std::log((1.0 + pulls * l_u * l_u / lambda) / delta);
  return 2.0 * std::sqrt(lambda) + r_eta * std::sqrt(d_u * log_term);
}

double zeta(const PolicyConfig& cfg, long pulls, int d_u) {
  return zeta(cfg.lambda, cfg.delta, cfg.r_eta, cfg.l_u, pulls, d_u);
}

double zeta_phi_hat(const PolicyConfig& cfg, long pulls, double err_sum) {
  const double log_term =
      std::log((1.0 + pulls * cfg.l_u * cfg.l_u / cfg.lambda) / (cfg.delta / 2.0));
  const double noise = std::sqrt(2.0 * (cfg.l_eps * cfg.l_eps + cfg.r_eta * cfg.r_eta) * log_term);
  return noise + cfg.l_u / std::sqrt(cfg.lambda) * err_sum + 2.0 * std::sqrt(cfg.lambda);
}

double phi_hat_lambda_schedule(double l_u, int d_u, long horizon, double alpha, double delta) {
  const double t = std::max<double>(horizon, 2);
  return l_u * std::pow(static_cast<double>(d_u), alpha) * std::pow(t, 1.0 - alpha) *
         std::log(t / delta);
}

UcbIndex ucb_index(const RidgeState& ridge, const Vec& u, double zeta_value, double e,
                   int d_z, double lambda) {
  const Vec w_hat = ridge.solve();
  UcbIndex idx;
  idx.exploit = u.dot(w_hat);
  idx.width = zeta_value * ridge.inv_norm(u);
  const double beta_norm = d_z > 0 ? w_hat.tail(d_z).norm() : 0.0;
  idx.phi_slack = e * std::min(1.0, beta_norm + zeta_value / std::sqrt(lambda));
  return idx;
}

namespace {

Vec stack(const Vec& x, const Vec& z) {
  Vec u(x.size() + z.size());
  u.head(x.size()) = x;
  if (z.size() > 0) u.tail(z.size()) = z;
  return u;
}

int argmax_index(const std::vector<double>& totals) {
  int best = 0;
  for (int a = 1; a < static_cast<int>(totals.size()); ++a) {
    if (totals[a] > totals[best]) best = a;
  }
  return best;
}

double per_round_delta(const PolicyConfig& cfg) {
  return cfg.delta / static_cast<double>(std::max<long>(cfg.horizon, 1));
}

}  // namespace

PoLinUcb::PoLinUcb(int arms, int d_x, int d_z, PolicyConfig cfg, std::unique_ptr<PhiModel> phi)
    : d_x_(d_x), d_z_(d_z), cfg_(cfg), phi_(std::move(phi)) {
  cfg_.validate();
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
  if (d_z_ > 0 && !phi_) throw ConfigError("policy: d_z > 0 requires a phi model");
  arms_.reserve(arms);
  for (int a = 0; a < arms; ++a) arms_.emplace_back(d_x_ + d_z_, cfg_.lambda);
}

UcbIndex PoLinUcb::index(int arm, const Vec& u, double e) const {
  const ArmModel& m = arms_.at(arm);
  return ucb_index(m.ridge, u, zeta(cfg_, m.pulls(), d_x_ + d_z_), e, d_z_, cfg_.lambda);
}

int PoLinUcb::select(const Round& round, Rng&) const {
  const Vec phi_hat = phi_ ? phi_->predict(round.x) : Vec(0);
  const double e = phi_ ? phi_->radius(round.x, per_round_delta(cfg_)) : 0.0;
  const Vec u = stack(round.x, phi_hat);
  std::vector<double> totals(arms_.size());
  for (int a = 0; a < arm_count(); ++a) totals[a] = index(a, u, e).total();
  return argmax_index(totals);
}

void PoLinUcb::observe(int arm, const Vec& x, const Vec& z, double reward) {
  arms_.at(arm).ridge.update(stack(x, z), reward);
  if (phi_) phi_->update(x, z);
}

LinUcbPhiHat::LinUcbPhiHat(int arms, int d_x, int d_z, PolicyConfig cfg,
                           std::unique_ptr<PhiModel> phi, bool theory_radius)
    : d_x_(d_x), d_z_(d_z), cfg_(cfg), theory_radius_(theory_radius), phi_(std::move(phi)) {
  cfg_.validate();
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
  if (!phi_) throw ConfigError("policy: phi model required");
  arms_.reserve(arms);
  for (int a = 0; a < arms; ++a) arms_.emplace_back(d_x_ + d_z_, cfg_.lambda);
}

int LinUcbPhiHat::select(const Round& round, Rng&) const {
  const Vec phi_hat = phi_->predict(round.x);
  const double e = phi_->radius(round.x, per_round_delta(cfg_));
  const Vec u = stack(round.x, phi_hat);
  std::vector<double> totals(arms_.size());
  for (int a = 0; a < arm_count(); ++a) {
    const ArmModel& m = arms_[a];
    const double width = theory_radius_ ? zeta_phi_hat(cfg_, m.pulls(), err_sum_)
                                        : zeta(cfg_, m.pulls(), d_x_ + d_z_);
    totals[a] = ucb_index(m.ridge, u, width, e, d_z_, cfg_.lambda).total();
  }
  return argmax_index(totals);
}

void LinUcbPhiHat::observe(int arm, const Vec& x, const Vec& z, double reward) {
  phi_->update(x, z);
  // The arm regresses on the prediction, not the realized context.
  arms_.at(arm).ridge.update(stack(x, phi_->predict(x)), reward);
  err_sum_ += phi_->radius(x, per_round_delta(cfg_));
}

LinUcbOracle::LinUcbOracle(int arms, int d_x, int d_z, PolicyConfig cfg)
    : d_x_(d_x), d_z_(d_z), cfg_(cfg) {
  cfg_.validate();
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
  arms_.reserve(arms);
  for (int a = 0; a < arms; ++a) arms_.emplace_back(d_x_ + d_z_, cfg_.lambda);
}

int LinUcbOracle::select(const Round& round, Rng&) const {
  const Vec u = stack(round.x, round.z);
  std::vector<double> totals(arms_.size());
  for (int a = 0; a < arm_count(); ++a) {
    const ArmModel& m = arms_[a];
    totals[a] =
        ucb_index(m.ridge, u, zeta(cfg_, m.pulls(), d_x_ + d_z_), 0.0, d_z_, cfg_.lambda).total();
  }
  return argmax_index(totals);
}

void LinUcbOracle::observe(int arm, const Vec& x, const Vec& z, double reward) {
  arms_.at(arm).ridge.update(stack(x, z), reward);
}

LinUcbXOnly::LinUcbXOnly(int arms, int d_x, PolicyConfig cfg) : d_x_(d_x), cfg_(cfg) {
  cfg_.validate();
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
  arms_.reserve(arms);
  for (int a = 0; a < arms; ++a) arms_.emplace_back(d_x_, cfg_.lambda);
}

int LinUcbXOnly::select(const Round& round, Rng&) const {
  std::vector<double> totals(arms_.size());
  for (int a = 0; a < arm_count(); ++a) {
    const ArmModel& m = arms_[a];
    totals[a] =
        ucb_index(m.ridge, round.x, zeta(cfg_, m.pulls(), d_x_), 0.0, 0, cfg_.lambda).total();
  }
  return argmax_index(totals);
}

void LinUcbXOnly::observe(int arm, const Vec& x, const Vec&, double reward) {
  arms_.at(arm).ridge.update(x, reward);
}

RandomPolicy::RandomPolicy(int arms) : arms_(arms) {
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
}

int RandomPolicy::select(const Round&, Rng& rng) const { return rng.uniform_int(arms_); }

AdcPoLinUcb::AdcPoLinUcb(int arms, int d_x, int d_z, PolicyConfig cfg,
                         const PhiModel& phi_prototype)
    : d_x_(d_x), d_z_(d_z), cfg_(cfg) {
  cfg_.validate();
  if (arms <= 0) throw ConfigError("policy: need at least one arm");
  arms_.reserve(arms);
  phis_.reserve(arms);
  for (int a = 0; a < arms; ++a) {
    arms_.emplace_back(d_x_ + d_z_, cfg_.lambda);
    phis_.push_back(phi_prototype.clone());
  }
}

int AdcPoLinUcb::select(const std::vector<Vec>& contexts) const {
  if (static_cast<int>(contexts.size()) != arm_count()) {
    throw std::invalid_argument("adc select: expected " + std::to_string(arm_count()) +
                                " contexts, got " + std::to_string(contexts.size()));
  }
  std::vector<double> totals(arms_.size());
  for (int a = 0; a < arm_count(); ++a) {
    const Vec u = stack(contexts[a], phis_[a]->predict(contexts[a]));
    const double e = phis_[a]->radius(contexts[a], per_round_delta(cfg_));
    const ArmModel& m = arms_[a];
    totals[a] =
        ucb_index(m.ridge, u, zeta(cfg_, m.pulls(), d_x_ + d_z_), e, d_z_, cfg_.lambda).total();
  }
  return argmax_index(totals);
}

void AdcPoLinUcb::observe(int arm, const Vec& x, const Vec& z, double reward) {
  arms_.at(arm).ridge.update(stack(x, z), reward);
  phis_.at(arm)->update(x, z);
}

StochasticPoLinUcb::StochasticPoLinUcb(int d_x, int d_z, PolicyConfig cfg,
                                       std::unique_ptr<PhiModel> phi)
    : d_x_(d_x), d_z_(d_z), cfg_(cfg), model_(d_x + d_z, cfg.lambda), phi_(std::move(phi)) {
  cfg_.validate();
  if (!phi_) throw ConfigError("policy: phi model required");
}

int StochasticPoLinUcb::select(const std::vector<Vec>& decision_set) const {
  if (decision_set.empty()) throw std::invalid_argument("stochastic select: empty decision set");
  const double zeta_value = zeta(cfg_, model_.pulls(), d_x_ + d_z_);
  std::vector<double> totals(decision_set.size());
  for (std::size_t i = 0; i < decision_set.size(); ++i) {
    const Vec& x = decision_set[i];
    const Vec u = stack(x, phi_->predict(x));
    const double e = phi_->radius(x, per_round_delta(cfg_));
    totals[i] = ucb_index(model_.ridge, u, zeta_value, e, d_z_, cfg_.lambda).total();
  }
  return argmax_index(totals);
}

void StochasticPoLinUcb::observe(const Vec& x, const Vec& z, double reward) {
  model_.ridge.update(stack(x, z), reward);
  phi_->update(x, z);
}

}  // namespace pob
