#pragma once

#include <memory>
#include <vector>

#include "pob/phi_estimator.hpp"
#include "pob/ridge.hpp"
#include "pob/rng.hpp"
#include "pob/types.hpp"

namespace pob {

/// Shared knobs for the confidence-bound policies.
struct PolicyConfig {
  double lambda = 1.0;   // ridge regularizer for the arm models
  double delta = 0.05;   // confidence level
  double r_eta = 0.1;    // sub-Gaussian scale of the reward noise
  double l_u = 1.0;      // bound on the stacked feature norm
  double l_eps = 0.0;    // bound on the post-serving noise norm (phi-hat radius)
  long horizon = 1000;   // T; per-round phi radii are queried at delta / T

  void validate() const;
};

/// Ellipsoid half-width for an arm fitted on `pulls` observations:
///   2*sqrt(lambda) + r_eta * sqrt(d_u * log((1 + pulls*l_u^2/lambda) / delta)).
double zeta(double lambda, double delta, double r_eta, double l_u, long pulls, int d_u);
double zeta(const PolicyConfig& cfg, long pulls, int d_u);

/// Enlarged half-width when arms are fitted on predicted rather than realized
/// post-serving contexts: a noise term at delta/2, the accumulated prediction
/// error scaled by l_u/sqrt(lambda), and the 2*sqrt(lambda) prior term.
double zeta_phi_hat(const PolicyConfig& cfg, long pulls, double err_sum);

/// Regularizer schedule for the predicted-context variant:
///   l_u * d_u^alpha * T^(1-alpha) * log(T/delta).
double phi_hat_lambda_schedule(double l_u, int d_u, long horizon, double alpha, double delta);

/// Per-arm state: ridge accumulator over the stacked dimension plus the pull
/// count (always equal to the accumulator's observation count).
struct ArmModel {
  explicit ArmModel(int d_u, double lambda) : ridge(d_u, lambda) {}
  [[nodiscard]] long pulls() const { return ridge.count(); }
  RidgeState ridge;
};

/// Decomposed optimistic index. total() is what gets maximized.
struct UcbIndex {
  double exploit = 0.0;    // <u, w_hat>
  double width = 0.0;      // zeta * |u|_{A^-1}
  double phi_slack = 0.0;  // e * min(1, |beta_hat| + zeta/sqrt(lambda))
  [[nodiscard]] double total() const { return exploit + width + phi_slack; }
};

/// Builds the index for one arm given its half-width and the phi error e.
/// d_z identifies the trailing block of w_hat whose norm caps the slack.
UcbIndex ucb_index(const RidgeState& ridge, const Vec& u, double zeta_value, double e,
                   int d_z, double lambda);

struct Round {
  Vec x;  // pre-serving context, visible to every policy
  Vec z;  // realized post-serving context; read only by the oracle baseline
};

/// One decision rule driving a single run. Selection is const — only
/// observe() mutates, and only for the pulled arm plus the owned phi model.
class BanditPolicy {
 public:
  virtual ~BanditPolicy() = default;
  [[nodiscard]] virtual int select(const Round& round, Rng& rng) const = 0;
  virtual void observe(int arm, const Vec& x, const Vec& z, double reward) = 0;
  [[nodiscard]] virtual int arm_count() const = 0;
};

/// Optimistic policy over the stacked vector (x, phi_hat(x)): exploit plus
/// ellipsoid width plus the phi-confidence slack. Arms absorb the realized
/// (x, z); the phi model absorbs (x, z) after each round.
class PoLinUcb : public BanditPolicy {
 public:
  /// phi may be null only when d_z == 0, in which case the policy degenerates
  /// to a standard confidence-bound rule on x alone.
  PoLinUcb(int arms, int d_x, int d_z, PolicyConfig cfg, std::unique_ptr<PhiModel> phi);

  [[nodiscard]] int select(const Round& round, Rng& rng) const override;
  void observe(int arm, const Vec& x, const Vec& z, double reward) override;
  [[nodiscard]] int arm_count() const override { return static_cast<int>(arms_.size()); }

  [[nodiscard]] UcbIndex index(int arm, const Vec& u, double e) const;
  [[nodiscard]] const ArmModel& arm(int a) const { return arms_.at(a); }
  [[nodiscard]] const PhiModel* phi() const { return phi_.get(); }
  [[nodiscard]] const PolicyConfig& config() const { return cfg_; }

 private:
  int d_x_;
  int d_z_;
  PolicyConfig cfg_;
  std::vector<ArmModel> arms_;
  std::unique_ptr<PhiModel> phi_;
};

/// Variant that regresses rewards on predicted post-serving contexts. The arm
/// models absorb (x, phi_hat(x)) — never the realized z. With the theory
/// radius (default) the half-width carries the accumulated prediction error
/// and the regularizer follows the T^(1-alpha) schedule; the plain radius
/// runs the standard width on the predicted features instead.
class LinUcbPhiHat : public BanditPolicy {
 public:
  LinUcbPhiHat(int arms, int d_x, int d_z, PolicyConfig cfg, std::unique_ptr<PhiModel> phi,
               bool theory_radius = true);

  [[nodiscard]] int select(const Round& round, Rng& rng) const override;
  void observe(int arm, const Vec& x, const Vec& z, double reward) override;
  [[nodiscard]] int arm_count() const override { return static_cast<int>(arms_.size()); }

  [[nodiscard]] double err_sum() const { return err_sum_; }
  [[nodiscard]] const ArmModel& arm(int a) const { return arms_.at(a); }

 private:
  int d_x_;
  int d_z_;
  PolicyConfig cfg_;
  bool theory_radius_;
  std::vector<ArmModel> arms_;
  std::unique_ptr<PhiModel> phi_;
  double err_sum_ = 0.0;
};

/// Upper-bound baseline: sees the realized z during selection.
class LinUcbOracle : public BanditPolicy {
 public:
  LinUcbOracle(int arms, int d_x, int d_z, PolicyConfig cfg);

  [[nodiscard]] int select(const Round& round, Rng& rng) const override;
  void observe(int arm, const Vec& x, const Vec& z, double reward) override;
  [[nodiscard]] int arm_count() const override { return static_cast<int>(arms_.size()); }

 private:
  int d_x_;
  int d_z_;
  PolicyConfig cfg_;
  std::vector<ArmModel> arms_;
};

/// Baseline restricted to the pre-serving context.
class LinUcbXOnly : public BanditPolicy {
 public:
  LinUcbXOnly(int arms, int d_x, PolicyConfig cfg);

  [[nodiscard]] int select(const Round& round, Rng& rng) const override;
  void observe(int arm, const Vec& x, const Vec& z, double reward) override;
  [[nodiscard]] int arm_count() const override { return static_cast<int>(arms_.size()); }

 private:
  int d_x_;
  PolicyConfig cfg_;
  std::vector<ArmModel> arms_;
};

/// Uniform-random baseline.
class RandomPolicy : public BanditPolicy {
 public:
  explicit RandomPolicy(int arms);

  [[nodiscard]] int select(const Round& round, Rng& rng) const override;
  void observe(int, const Vec&, const Vec&, double) override {}
  [[nodiscard]] int arm_count() const override { return arms_; }

 private:
  int arms_;
};

/// Action-dependent-context variant: one context and one phi model per arm;
/// only the pulled arm's estimator sees the revealed pair.
class AdcPoLinUcb {
 public:
  AdcPoLinUcb(int arms, int d_x, int d_z, PolicyConfig cfg, const PhiModel& phi_prototype);

  [[nodiscard]] int select(const std::vector<Vec>& contexts) const;
  void observe(int arm, const Vec& x, const Vec& z, double reward);

  [[nodiscard]] int arm_count() const { return static_cast<int>(arms_.size()); }
  [[nodiscard]] const PhiModel& phi(int arm) const { return *phis_.at(arm); }
  [[nodiscard]] const ArmModel& arm(int a) const { return arms_.at(a); }

 private:
  int d_x_;
  int d_z_;
  PolicyConfig cfg_;
  std::vector<ArmModel> arms_;
  std::vector<std::unique_ptr<PhiModel>> phis_;
};

/// Decision-set variant: a single parameter model shared across all actions;
/// each round picks the member of the offered set with the best index.
class StochasticPoLinUcb {
 public:
  StochasticPoLinUcb(int d_x, int d_z, PolicyConfig cfg, std::unique_ptr<PhiModel> phi);

  [[nodiscard]] int select(const std::vector<Vec>& decision_set) const;
  void observe(const Vec& x, const Vec& z, double reward);

  [[nodiscard]] const ArmModel& model() const { return model_; }
  [[nodiscard]] PhiModel* phi() { return phi_.get(); }
  [[nodiscard]] RidgeState& mutable_ridge() { return model_.ridge; }

 private:
  int d_x_;
  int d_z_;
  PolicyConfig cfg_;
  ArmModel model_;
  std::unique_ptr<PhiModel> phi_;
};

}  // namespace pob
