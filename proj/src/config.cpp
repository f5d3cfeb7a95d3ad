#include "pob/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pob {

namespace {

using nlohmann::json;

json parse_json(const std::string& text, const char* what) {
  json doc = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) throw ConfigError(std::string(what) + ": invalid JSON");
  return doc;
}

void require_keys(const json& obj, const std::set<std::string>& allowed, const char* where) {
  if (!obj.is_object()) throw ConfigError(std::string(where) + ": expected a JSON object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) {
      throw ConfigError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config: key '") + key + "' has the wrong type");
  }
}

PhiEstimatorConfig parse_phi(const json& obj) {
  require_keys(obj, {"kind", "lambda", "l_phi", "r_eps", "features", "c0", "alpha"}, "phi");
  PhiEstimatorConfig out;
  out.kind = get_or<std::string>(obj, "kind", out.kind);
  out.lambda = get_or<double>(obj, "lambda", out.lambda);
  out.l_phi = get_or<double>(obj, "l_phi", out.l_phi);
  out.r_eps = get_or<double>(obj, "r_eps", out.r_eps);
  out.features = get_or<std::string>(obj, "features", out.features);
  out.c0 = get_or<double>(obj, "c0", out.c0);
  out.alpha = get_or<double>(obj, "alpha", out.alpha);
  if (out.kind != "linear" && out.kind != "exact" && out.kind != "generic") {
    throw ConfigError("phi: unknown estimator kind '" + out.kind + "'");
  }
  if (out.features != "identity" && out.features != "square") {
    throw ConfigError("phi: unknown feature map '" + out.features + "'");
  }
  return out;
}

}  // namespace

const std::vector<std::string>& policy_registry() {
  static const std::vector<std::string> names = {
      "polinucb",     "linucb_phihat",       "linucb_oracle", "linucb_xonly",
      "random",       "adc_polinucb",        "stochastic_polinucb"};
  return names;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
  const json doc = parse_json(json_text, "experiment config");
  require_keys(doc, {"env", "policies", "horizon", "seeds", "output_dir"}, "config");
  if (!doc.contains("env") || !doc.contains("policies") || !doc.contains("seeds")) {
    throw ConfigError("config: 'env', 'policies' and 'seeds' are required");
  }

  ExperimentConfig cfg;
  const json& env = doc.at("env");
  require_keys(env,
               {"family", "d_x", "d_z", "K", "l_z", "sigma_eps", "r_eta", "theta_scale",
                "beta_scale", "beta_spread", "noiseless_reward", "env_seed", "replay_path",
                "replay_items", "decision_size"},
               "env");
  cfg.env.family = get_or<std::string>(env, "family", "");
  cfg.env.d_x = get_or<int>(env, "d_x", cfg.env.d_x);
  cfg.env.d_z = get_or<int>(env, "d_z", cfg.env.d_z);
  cfg.env.arms = get_or<int>(env, "K", cfg.env.arms);
  cfg.env.l_z = get_or<double>(env, "l_z", cfg.env.l_z);
  cfg.env.sigma_eps = get_or<double>(env, "sigma_eps", cfg.env.sigma_eps);
  cfg.env.r_eta = get_or<double>(env, "r_eta", cfg.env.r_eta);
  cfg.env.theta_scale = get_or<double>(env, "theta_scale", cfg.env.theta_scale);
  cfg.env.beta_scale = get_or<double>(env, "beta_scale", cfg.env.beta_scale);
  cfg.env.beta_spread = get_or<double>(env, "beta_spread", cfg.env.beta_spread);
  if (cfg.env.beta_spread < 0.0 || cfg.env.beta_spread > 1.0) {
    throw ConfigError("env: beta_spread must lie in [0, 1]");
  }
  cfg.env.noiseless_reward = get_or<bool>(env, "noiseless_reward", cfg.env.noiseless_reward);
  cfg.env.env_seed = get_or<std::uint64_t>(env, "env_seed", cfg.env.env_seed);
  cfg.env.replay_path = get_or<std::string>(env, "replay_path", cfg.env.replay_path);
  cfg.env.replay_items = get_or<int>(env, "replay_items", cfg.env.replay_items);
  cfg.env.decision_size = get_or<int>(env, "decision_size", cfg.env.decision_size);

  static const std::set<std::string> families = {"linear", "polynomial", "periodic",
                                                 "counterexample", "replay"};
  if (!families.count(cfg.env.family)) {
    throw ConfigError("env: unknown family '" + cfg.env.family + "'");
  }
  if (cfg.env.family == "replay" && cfg.env.replay_path.empty()) {
    throw ConfigError("env: replay family requires 'replay_path'");
  }

  for (const json& p : doc.at("policies")) {
    require_keys(p, {"name", "lambda", "delta", "r_eta", "l_u", "l_eps", "variant", "phi"},
                 "policy");
    PolicySpec spec;
    spec.name = get_or<std::string>(p, "name", "");
    const auto& registry = policy_registry();
    if (std::find(registry.begin(), registry.end(), spec.name) == registry.end()) {
      throw ConfigError("policy: unknown name '" + spec.name + "'");
    }
    if (p.contains("lambda")) spec.lambda = p.at("lambda").get<double>();
    if (p.contains("delta")) spec.delta = p.at("delta").get<double>();
    if (p.contains("r_eta")) spec.r_eta = p.at("r_eta").get<double>();
    if (p.contains("l_u")) spec.l_u = p.at("l_u").get<double>();
    if (p.contains("l_eps")) spec.l_eps = p.at("l_eps").get<double>();
    spec.variant = get_or<std::string>(p, "variant", "");
    if (!spec.variant.empty()) {
      if (spec.name != "linucb_phihat") {
        throw ConfigError("policy '" + spec.name + "': does not take a variant");
      }
      if (spec.variant != "theory" && spec.variant != "plain") {
        throw ConfigError("policy: unknown variant '" + spec.variant + "'");
      }
    }
    if (p.contains("phi")) {
      static const std::set<std::string> phi_users = {"polinucb", "linucb_phihat",
                                                      "adc_polinucb", "stochastic_polinucb"};
      if (!phi_users.count(spec.name)) {
        throw ConfigError("policy '" + spec.name + "': does not take a phi estimator");
      }
      spec.phi = parse_phi(p.at("phi"));
    }
    cfg.policies.push_back(std::move(spec));
  }
  if (cfg.policies.empty()) throw ConfigError("config: at least one policy required");

  cfg.horizon = get_or<long>(doc, "horizon", cfg.horizon);
  if (cfg.horizon < 0) throw ConfigError("config: horizon must be nonnegative");

  std::set<std::uint64_t> seen;
  for (const json& s : doc.at("seeds")) {
    const auto seed = s.get<std::uint64_t>();
    if (!seen.insert(seed).second) {
      throw ConfigError("config: duplicate seed " + std::to_string(seed));
    }
    cfg.seeds.push_back(seed);
  }
  if (cfg.seeds.empty()) throw ConfigError("config: at least one seed required");

  cfg.output_dir = get_or<std::string>(doc, "output_dir", cfg.output_dir);
  return cfg;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

ExperimentConfig load_experiment_config(const std::string& path) {
  return parse_experiment_config(slurp(path));
}

std::vector<EplTrialConfig> parse_epl_configs(const std::string& json_text) {
  const json doc = parse_json(json_text, "epl config");
  require_keys(doc, {"configs"}, "epl config");
  if (!doc.contains("configs")) throw ConfigError("epl config: 'configs' is required");
  std::vector<EplTrialConfig> out;
  for (const json& c : doc.at("configs")) {
    require_keys(c, {"d", "T", "p", "l_x", "l_eps", "sigma_eps", "x0_scale", "delta", "trials",
                     "seed"},
                 "epl config entry");
    EplTrialConfig cfg;
    cfg.d = get_or<int>(c, "d", cfg.d);
    cfg.horizon = get_or<long>(c, "T", cfg.horizon);
    cfg.p = get_or<double>(c, "p", cfg.p);
    cfg.l_x = get_or<double>(c, "l_x", cfg.l_x);
    cfg.l_eps = get_or<double>(c, "l_eps", cfg.l_eps);
    cfg.sigma_eps = get_or<double>(c, "sigma_eps", cfg.sigma_eps);
    cfg.x0_scale = get_or<double>(c, "x0_scale", cfg.x0_scale);
    cfg.delta = get_or<double>(c, "delta", cfg.delta);
    cfg.trials = get_or<int>(c, "trials", cfg.trials);
    cfg.seed = get_or<std::uint64_t>(c, "seed", cfg.seed);
    cfg.validate();
    out.push_back(cfg);
  }
  if (out.empty()) throw ConfigError("epl config: no entries");
  return out;
}

std::vector<EplTrialConfig> load_epl_configs(const std::string& path) {
  return parse_epl_configs(slurp(path));
}

CoverageConfig parse_coverage_config(const std::string& json_text) {
  const json doc = parse_json(json_text, "coverage config");
  require_keys(doc, {"kind", "runs", "horizon", "d_x", "d_z", "K", "delta", "seed"},
               "coverage config");
  CoverageConfig cfg;
  cfg.kind = get_or<std::string>(doc, "kind", cfg.kind);
  if (cfg.kind != "w" && cfg.kind != "phi") {
    throw ConfigError("coverage: kind must be 'w' or 'phi'");
  }
  cfg.runs = get_or<int>(doc, "runs", cfg.runs);
  cfg.horizon = get_or<long>(doc, "horizon", cfg.horizon);
  cfg.d_x = get_or<int>(doc, "d_x", cfg.d_x);
  cfg.d_z = get_or<int>(doc, "d_z", cfg.d_z);
  cfg.arms = get_or<int>(doc, "K", cfg.arms);
  cfg.delta = get_or<double>(doc, "delta", cfg.delta);
  cfg.seed = get_or<std::uint64_t>(doc, "seed", cfg.seed);
  if (cfg.runs <= 0 || cfg.horizon <= 0 || cfg.d_x <= 0 || cfg.d_z <= 0 || cfg.arms <= 0) {
    throw ConfigError("coverage: counts and dimensions must be positive");
  }
  if (!(cfg.delta > 0.0) || cfg.delta >= 1.0) throw ConfigError("coverage: delta in (0,1)");
  return cfg;
}

CoverageConfig load_coverage_config(const std::string& path) {
  return parse_coverage_config(slurp(path));
}

}  // namespace pob
