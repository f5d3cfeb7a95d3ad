#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pob/epl.hpp"
#include "pob/types.hpp"

namespace pob {

struct EnvConfig {
  std::string family;  // linear | polynomial | periodic | counterexample | replay
  int d_x = 10;
  int d_z = 3;
  int arms = 5;
  double l_z = 0.0;          // output bound of phi; 0 -> context norm bound
  double sigma_eps = -1.0;   // post-serving noise scale; <0 -> 0.1 * l_z
  double r_eta = 0.1;        // reward noise scale
  double theta_scale = 0.5;  // norm of the per-arm theta draws (<= 1)
  double beta_scale = 1.0;   // norm of the per-arm beta draws (<= 1)
  double beta_spread = 1.0;  // 1: independent per-arm betas; 0: one shared beta
  bool noiseless_reward = false;
  std::uint64_t env_seed = 1234;  // parameter draws; shared across run seeds
  std::string replay_path;
  int replay_items = 0;   // 0 -> keep every item row
  int decision_size = 0;  // stochastic variant candidate count; 0 -> arms
};

struct PhiEstimatorConfig {
  std::string kind = "linear";        // linear | exact | generic
  double lambda = 1.0;                // feature-gram regularizer
  double l_phi = 0.0;                 // 0 -> sqrt(d_z)
  double r_eps = -1.0;                // <0 -> environment sigma_eps
  std::string features = "identity";  // identity | square
  double c0 = 1.0;                    // generic radius constant
  double alpha = 0.5;                 // generic convergence exponent
};

struct PolicySpec {
  std::string name;
  std::optional<double> lambda;
  std::optional<double> delta;
  std::optional<double> r_eta;
  std::optional<double> l_u;
  std::optional<double> l_eps;
  std::string variant;  // linucb_phihat: "theory" (default) or "plain"
  PhiEstimatorConfig phi;
};

struct ExperimentConfig {
  EnvConfig env;
  std::vector<PolicySpec> policies;
  long horizon = 1000;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
};

/// Strict parse: unknown keys anywhere in the document are rejected.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

std::vector<EplTrialConfig> parse_epl_configs(const std::string& json_text);
std::vector<EplTrialConfig> load_epl_configs(const std::string& path);

struct CoverageConfig {
  std::string kind = "w";  // w: parameter ellipsoid; phi: estimator radius
  int runs = 500;
  long horizon = 200;  // per-run rounds (w) or fitted samples (phi)
  int d_x = 3;
  int d_z = 2;
  int arms = 3;
  double delta = 0.05;
  std::uint64_t seed = 7;
};

CoverageConfig parse_coverage_config(const std::string& json_text);
CoverageConfig load_coverage_config(const std::string& path);

/// Names accepted in ExperimentConfig::policies.
const std::vector<std::string>& policy_registry();

}  // namespace pob
