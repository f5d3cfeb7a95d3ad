#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pob/phi_map.hpp"
#include "pob/rng.hpp"
#include "pob/types.hpp"

namespace pob {

/// Law of the pre-serving context: either the uniform box
/// [-half_width, half_width]^{d_x} or a finite support sampled uniformly.
struct ContextLaw {
  double half_width = 10.0;
  std::vector<Vec> support;  // nonempty -> discrete uniform over these points

  [[nodiscard]] Vec sample(int d_x, Rng& rng) const;
  [[nodiscard]] double sup_norm_bound(int d_x) const;
};

/// Synthetic ground truth: per-arm reward parameters, the post-serving map
/// phi and both noise channels. Immutable after construction; callers own
/// the generator, so const instances are safe to share across run workers.
class SyntheticEnv {
 public:
  SyntheticEnv(std::vector<Vec> theta_star, std::vector<Vec> beta_star, PhiMap phi,
               ContextLaw context_law, double sigma_eps, double r_eta,
               bool noiseless_reward);

  /// Draws one round: x from the context law, z = phi(x) + eps with eps a
  /// truncated Gaussian (resampled until |eps| <= l_eps()).
  [[nodiscard]] std::pair<Vec, Vec> sample_round(Rng& rng) const;

  /// The post-serving context for a given x: phi(x) plus truncated noise.
  [[nodiscard]] Vec sample_post_context(const Vec& x, Rng& rng) const;

  /// x' theta_a + z' beta_a + eta; with noiseless rewards, the exact mean
  /// reward (z replaced by phi(x), no eta).
  [[nodiscard]] double realized_reward(int arm, const Vec& x, const Vec& z, Rng& rng) const;

  /// <theta_a, x> + <beta_a, phi(x)> — the noise-free benchmark reward.
  [[nodiscard]] double mean_reward(int arm, const Vec& x) const;

  /// Arm with the highest mean reward; ties resolve to the lowest index.
  [[nodiscard]] int best_arm(const Vec& x) const;

  [[nodiscard]] int arm_count() const { return static_cast<int>(theta_star_.size()); }
  [[nodiscard]] int d_x() const { return phi_.in_dim(); }
  [[nodiscard]] int d_z() const { return phi_.out_dim(); }
  [[nodiscard]] const PhiMap& phi() const { return phi_; }
  [[nodiscard]] const Vec& theta_star(int arm) const { return theta_star_.at(arm); }
  [[nodiscard]] const Vec& beta_star(int arm) const { return beta_star_.at(arm); }
  [[nodiscard]] const ContextLaw& context_law() const { return context_law_; }
  [[nodiscard]] double sigma_eps() const { return sigma_eps_; }
  [[nodiscard]] double l_eps() const { return l_eps_; }
  [[nodiscard]] double r_eta() const { return r_eta_; }
  [[nodiscard]] bool noiseless_reward() const { return noiseless_reward_; }
  [[nodiscard]] double l_x() const { return context_law_.sup_norm_bound(d_x()); }
  [[nodiscard]] double l_z() const;

 private:
  void check_arm(int arm) const;

  std::vector<Vec> theta_star_;
  std::vector<Vec> beta_star_;
  PhiMap phi_;
  ContextLaw context_law_;
  double sigma_eps_;
  double l_eps_;
  double r_eta_;
  bool noiseless_reward_;
};

/// The two-arm scalar environment where any policy ignoring the post-serving
/// context is forced into linear regret: phi(x) = x^2, x uniform over
/// {-3, -1, 1}, noiseless rewards x + x^2/2 and -x - x^2/2.
SyntheticEnv counterexample_env();

/// Replay over a pre-featurized table: each user row splits into a
/// pre-serving block (first d_x entries) and a post-serving block; the reward
/// of showing item v to user u is the deterministic dot product <u, v>.
class ReplayEnv {
 public:
  ReplayEnv(int d_x, int d_z, std::vector<Vec> items, std::vector<Vec> users);

  [[nodiscard]] int arm_count() const { return static_cast<int>(items_.size()); }
  [[nodiscard]] int user_count() const { return static_cast<int>(users_.size()); }
  [[nodiscard]] int d_x() const { return d_x_; }
  [[nodiscard]] int d_z() const { return d_z_; }

  [[nodiscard]] int sample_user(Rng& rng) const;
  [[nodiscard]] Vec user_x(int user) const { return users_.at(user).head(d_x_); }
  [[nodiscard]] Vec user_z(int user) const { return users_.at(user).tail(d_z_); }
  [[nodiscard]] double reward(int user, int arm) const;
  [[nodiscard]] int best_arm(int user) const;

  /// Largest user-row and item-row norms; used for policy scale defaults.
  [[nodiscard]] double max_user_norm() const;
  [[nodiscard]] double max_x_norm() const;
  [[nodiscard]] double max_z_norm() const;

 private:
  int d_x_;
  int d_z_;
  std::vector<Vec> items_;
  std::vector<Vec> users_;
};

/// Parses the feature-table format: header `d_x,<int>,d_z,<int>`, an
/// `[items]` section, then a `[users]` section, comma-separated floats.
/// max_items > 0 keeps only the first max_items item rows.
ReplayEnv load_replay(const std::string& path, int max_items = 0);

}  // namespace pob
