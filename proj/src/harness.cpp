#include "pob/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

#include "pob/svg.hpp"

namespace pob {

namespace {

struct EnvTraits {
  int d_x = 0;
  int d_z = 0;
  int arms = 0;
  double l_x = 1.0;
  double l_z = 0.0;       // bound on |z| including noise
  double sigma_eps = 0.0;
  double l_eps = 0.0;
  double r_eta = 0.0;
  const PhiMap* phi = nullptr;  // synthetic ground truth, when available
};

EnvTraits traits_of(const SyntheticEnv& env) {
  EnvTraits tr;
  tr.d_x = env.d_x();
  tr.d_z = env.d_z();
  tr.arms = env.arm_count();
  tr.l_x = env.l_x();
  tr.l_z = env.l_z();
  tr.sigma_eps = env.sigma_eps();
  tr.l_eps = env.l_eps();
  tr.r_eta = env.r_eta();
  tr.phi = &env.phi();
  return tr;
}

EnvTraits traits_of(const ReplayEnv& env) {
  EnvTraits tr;
  tr.d_x = env.d_x();
  tr.d_z = env.d_z();
  tr.arms = env.arm_count();
  tr.l_x = env.max_x_norm();
  tr.l_z = env.max_z_norm();
  tr.sigma_eps = 0.0;
  tr.l_eps = 0.0;
  tr.r_eta = 0.1;  // exploration floor; replay rewards are deterministic
  return tr;
}

SyntheticEnv build_synthetic_env(const EnvConfig& cfg) {
  if (cfg.family == "counterexample") return counterexample_env();
  if (cfg.d_x <= 0 || cfg.d_z <= 0 || cfg.arms <= 0) {
    throw ConfigError("env: d_x, d_z and K must be positive");
  }
  Rng rng(cfg.env_seed);
  const double half_width = 10.0;
  const double l_x = half_width * std::sqrt(static_cast<double>(cfg.d_x));
  const double l_z = cfg.l_z > 0.0 ? cfg.l_z : l_x;
  const double sigma_eps = cfg.sigma_eps >= 0.0 ? cfg.sigma_eps : 0.1 * l_z;

  PhiMap phi = [&] {
    if (cfg.family == "linear") return PhiMap::random_linear(cfg.d_x, cfg.d_z, l_x, l_z, rng);
    if (cfg.family == "polynomial") {
      return PhiMap::polynomial(cfg.d_x, cfg.d_z, half_width, l_z, rng);
    }
    if (cfg.family == "periodic") return PhiMap::periodic(cfg.d_x, cfg.d_z, l_z, rng);
    throw ConfigError("env: unknown family '" + cfg.family + "'");
  }();

  std::vector<Vec> theta(cfg.arms);
  std::vector<Vec> beta(cfg.arms);
  const Vec beta_core = rng.sphere(cfg.d_z, 1.0);
  for (int a = 0; a < cfg.arms; ++a) {
    theta[a] = rng.sphere(cfg.d_x, cfg.theta_scale);
    // Per-arm betas share a core direction; beta_spread sets how much of the
    // budget goes to the arm-specific component.
    const Vec own = rng.sphere(cfg.d_z, 1.0);
    beta[a] = cfg.beta_scale *
              ((1.0 - cfg.beta_spread) * beta_core + cfg.beta_spread * own);
  }
  ContextLaw law;
  law.half_width = half_width;
  return SyntheticEnv(std::move(theta), std::move(beta), std::move(phi), std::move(law),
                      sigma_eps, cfg.r_eta, cfg.noiseless_reward);
}

FeatureMap feature_map_of(const std::string& name) {
  if (name == "identity") return FeatureMap::identity();
  if (name == "square") return FeatureMap::square();
  if (name == "quadratic") return FeatureMap::quadratic();
  if (name == "sine") return FeatureMap::sine();
  throw ConfigError("phi: unknown feature map '" + name + "'");
}

std::unique_ptr<PhiModel> build_phi_model(const PhiEstimatorConfig& pc, const EnvTraits& tr) {
  if (pc.kind == "exact") {
    if (tr.phi == nullptr) {
      throw ConfigError("phi: exact estimator needs a synthetic ground truth");
    }
    const PhiMap phi = *tr.phi;  // value copy; outlives the environment
    return std::make_unique<ExactPhi>([phi](const Vec& x) { return phi(x); }, tr.d_z);
  }
  LinearPhiConfig lc;
  lc.lambda = pc.lambda;
  lc.l_phi = pc.l_phi;
  lc.r_eps = pc.r_eps >= 0.0 ? pc.r_eps : tr.sigma_eps;
  lc.l_x = tr.l_x;
  lc.features = feature_map_of(pc.features);
  if (pc.kind == "generic") lc.generic = ErrorModel(pc.c0, pc.alpha);
  return std::make_unique<LinearPhiEstimator>(tr.d_x, tr.d_z, lc);
}

double estimator_alpha(const PhiEstimatorConfig& pc) {
  return pc.kind == "generic" ? pc.alpha : 0.5;
}

PolicyConfig make_policy_config(const PolicySpec& spec, const EnvTraits& tr, long horizon) {
  PolicyConfig pc;
  pc.delta = spec.delta.value_or(0.05);
  pc.r_eta = spec.r_eta.value_or(tr.r_eta);
  const double stacked = std::sqrt(tr.l_x * tr.l_x + tr.l_z * tr.l_z);
  pc.l_u = spec.l_u.value_or(spec.name == "linucb_xonly" ? tr.l_x : stacked);
  pc.l_eps = spec.l_eps.value_or(tr.l_eps);
  pc.horizon = horizon;
  if (spec.lambda) {
    pc.lambda = *spec.lambda;
  } else if (spec.name == "linucb_phihat" && spec.variant != "plain") {
    pc.lambda = phi_hat_lambda_schedule(pc.l_u, tr.d_x + tr.d_z, horizon,
                                        estimator_alpha(spec.phi), pc.delta);
  } else {
    pc.lambda = 1.0;
  }
  pc.validate();
  return pc;
}

std::unique_ptr<BanditPolicy> build_standard_policy(const PolicySpec& spec, const EnvTraits& tr,
                                                    long horizon) {
  const PolicyConfig pc = make_policy_config(spec, tr, horizon);
  if (spec.name == "polinucb") {
    return std::make_unique<PoLinUcb>(tr.arms, tr.d_x, tr.d_z, pc, build_phi_model(spec.phi, tr));
  }
  if (spec.name == "linucb_phihat") {
    return std::make_unique<LinUcbPhiHat>(tr.arms, tr.d_x, tr.d_z, pc,
                                          build_phi_model(spec.phi, tr),
                                          spec.variant != "plain");
  }
  if (spec.name == "linucb_oracle") {
    return std::make_unique<LinUcbOracle>(tr.arms, tr.d_x, tr.d_z, pc);
  }
  if (spec.name == "linucb_xonly") return std::make_unique<LinUcbXOnly>(tr.arms, tr.d_x, pc);
  if (spec.name == "random") return std::make_unique<RandomPolicy>(tr.arms);
  throw ConfigError("unknown policy name '" + spec.name + "'");
}

RunRecord run_standard_synthetic(const ExperimentConfig& cfg, const PolicySpec& spec,
                                 std::uint64_t seed, const RunHooks* hooks,
                                 const SyntheticEnv& env) {
  RunRecord rec;
  rec.policy = spec.name;
  rec.seed = seed;
  auto policy = build_standard_policy(spec, traits_of(env), cfg.horizon);
  Rng env_rng = Rng::derive(seed, 0);
  Rng policy_rng = Rng::derive(seed, 1);
  double cum = 0.0;
  rec.rounds.reserve(cfg.horizon);
  for (long t = 1; t <= cfg.horizon; ++t) {
    const auto [x, z] = env.sample_round(env_rng);
    if (hooks && hooks->pre_select) hooks->pre_select(t, *policy);
    const int a = policy->select({x, z}, policy_rng);
    const double r = env.realized_reward(a, x, z, env_rng);
    const double inst = env.mean_reward(env.best_arm(x), x) - env.mean_reward(a, x);
    cum += inst;
    rec.rounds.push_back({t, a, inst, cum});
    policy->observe(a, x, z, r);
  }
  return rec;
}

RunRecord run_standard_replay(const ExperimentConfig& cfg, const PolicySpec& spec,
                              std::uint64_t seed, const RunHooks* hooks, const ReplayEnv& env) {
  RunRecord rec;
  rec.policy = spec.name;
  rec.seed = seed;
  auto policy = build_standard_policy(spec, traits_of(env), cfg.horizon);
  Rng env_rng = Rng::derive(seed, 0);
  Rng policy_rng = Rng::derive(seed, 1);
  double cum = 0.0;
  rec.rounds.reserve(cfg.horizon);
  for (long t = 1; t <= cfg.horizon; ++t) {
    const int user = env.sample_user(env_rng);
    const Vec x = env.user_x(user);
    const Vec z = env.user_z(user);
    if (hooks && hooks->pre_select) hooks->pre_select(t, *policy);
    const int a = policy->select({x, z}, policy_rng);
    const double r = env.reward(user, a);
    const double inst = env.reward(user, env.best_arm(user)) - r;
    cum += inst;
    rec.rounds.push_back({t, a, inst, cum});
    policy->observe(a, x, z, r);
  }
  return rec;
}

RunRecord run_adc(const ExperimentConfig& cfg, const PolicySpec& spec, std::uint64_t seed,
                  const SyntheticEnv& env) {
  RunRecord rec;
  rec.policy = spec.name;
  rec.seed = seed;
  const EnvTraits tr = traits_of(env);
  const PolicyConfig pc = make_policy_config(spec, tr, cfg.horizon);
  const auto prototype = build_phi_model(spec.phi, tr);
  AdcPoLinUcb policy(tr.arms, tr.d_x, tr.d_z, pc, *prototype);
  Rng env_rng = Rng::derive(seed, 0);
  double cum = 0.0;
  rec.rounds.reserve(cfg.horizon);
  std::vector<Vec> contexts(tr.arms);
  for (long t = 1; t <= cfg.horizon; ++t) {
    for (int a = 0; a < tr.arms; ++a) {
      contexts[a] = env.context_law().sample(tr.d_x, env_rng);
    }
    const int a = policy.select(contexts);
    const Vec z = env.sample_post_context(contexts[a], env_rng);
    const double r = env.realized_reward(a, contexts[a], z, env_rng);
    double best = env.mean_reward(0, contexts[0]);
    for (int b = 1; b < tr.arms; ++b) best = std::max(best, env.mean_reward(b, contexts[b]));
    const double inst = best - env.mean_reward(a, contexts[a]);
    cum += inst;
    rec.rounds.push_back({t, a, inst, cum});
    policy.observe(a, contexts[a], z, r);
  }
  return rec;
}

RunRecord run_stochastic(const ExperimentConfig& cfg, const PolicySpec& spec, std::uint64_t seed,
                         const SyntheticEnv& env) {
  RunRecord rec;
  rec.policy = spec.name;
  rec.seed = seed;
  const EnvTraits tr = traits_of(env);
  const PolicyConfig pc = make_policy_config(spec, tr, cfg.horizon);
  StochasticPoLinUcb policy(tr.d_x, tr.d_z, pc, build_phi_model(spec.phi, tr));
  const int set_size = cfg.env.decision_size > 0 ? cfg.env.decision_size : tr.arms;
  Rng env_rng = Rng::derive(seed, 0);
  double cum = 0.0;
  rec.rounds.reserve(cfg.horizon);
  std::vector<Vec> decision_set(set_size);
  for (long t = 1; t <= cfg.horizon; ++t) {
    for (int i = 0; i < set_size; ++i) {
      decision_set[i] = env.context_law().sample(tr.d_x, env_rng);
    }
    const int choice = policy.select(decision_set);
    const Vec& x = decision_set[choice];
    const Vec z = env.sample_post_context(x, env_rng);
    const double r = env.realized_reward(0, x, z, env_rng);
    double best = env.mean_reward(0, decision_set[0]);
    for (int i = 1; i < set_size; ++i) best = std::max(best, env.mean_reward(0, decision_set[i]));
    const double inst = best - env.mean_reward(0, x);
    cum += inst;
    rec.rounds.push_back({t, choice, inst, cum});
    policy.observe(x, z, r);
  }
  return rec;
}

}  // namespace

double RunRecord::regret_at(long t) const {
  if (t <= 0 || rounds.empty()) return 0.0;
  const std::size_t idx = std::min<std::size_t>(rounds.size(), static_cast<std::size_t>(t));
  return rounds[idx - 1].cum_regret;
}

RunRecord run_experiment(const ExperimentConfig& cfg, const PolicySpec& spec,
                         std::uint64_t seed, const RunHooks* hooks) {
  const auto& registry = policy_registry();
  if (std::find(registry.begin(), registry.end(), spec.name) == registry.end()) {
    throw ConfigError("unknown policy name '" + spec.name + "'");
  }
  const auto start = std::chrono::steady_clock::now();
  RunRecord rec;
  if (cfg.env.family == "replay") {
    if (spec.name == "adc_polinucb" || spec.name == "stochastic_polinucb") {
      throw ConfigError("policy '" + spec.name + "' is not available on replay environments");
    }
    const ReplayEnv env = load_replay(cfg.env.replay_path, cfg.env.replay_items);
    rec = run_standard_replay(cfg, spec, seed, hooks, env);
  } else {
    const SyntheticEnv env = build_synthetic_env(cfg.env);
    if (spec.name == "adc_polinucb") {
      rec = run_adc(cfg, spec, seed, env);
    } else if (spec.name == "stochastic_polinucb") {
      rec = run_stochastic(cfg, spec, seed, env);
    } else {
      rec = run_standard_synthetic(cfg, spec, seed, hooks, env);
    }
  }
  rec.wall_time_sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

std::vector<CurvePoint> aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no records");
  const std::size_t horizon = records[0].rounds.size();
  for (const auto& r : records) {
    if (r.rounds.size() != horizon) {
      throw std::invalid_argument("aggregate: mismatched horizons");
    }
  }
  const double n = static_cast<double>(records.size());
  std::vector<CurvePoint> curve(horizon);
  for (std::size_t i = 0; i < horizon; ++i) {
    double mean = 0.0;
    for (const auto& r : records) mean += r.rounds[i].cum_regret;
    mean /= n;
    double sq = 0.0;
    for (const auto& r : records) {
      const double d = r.rounds[i].cum_regret - mean;
      sq += d * d;
    }
    const double std_error = records.size() > 1 ? std::sqrt(sq / (n - 1.0)) / std::sqrt(n) : 0.0;
    curve[i] = {records[0].rounds[i].t, mean, std_error};
  }
  return curve;
}

std::vector<RunRecord> run_all(const ExperimentConfig& cfg, int jobs) {
  struct Task {
    const PolicySpec* spec;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& spec : cfg.policies) {
    for (const auto seed : cfg.seeds) tasks.push_back({&spec, seed});
  }
  std::vector<RunRecord> results(tasks.size());
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  if (workers == 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      results[i] = run_experiment(cfg, *tasks[i].spec, tasks[i].seed);
    }
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= tasks.size()) return;
        try {
          results[i] = run_experiment(cfg, *tasks[i].spec, tasks[i].seed);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return results;
}

std::string regret_csv(std::vector<RunRecord> records) {
  std::sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    if (a.policy != b.policy) return a.policy < b.policy;
    return a.seed < b.seed;
  });
  std::string out = "policy,seed,t,arm,inst_regret,cum_regret\n";
  char buf[192];
  for (const auto& rec : records) {
    for (const auto& row : rec.rounds) {
      std::snprintf(buf, sizeof(buf), "%s,%llu,%ld,%d,%.9g,%.9g\n", rec.policy.c_str(),
                    static_cast<unsigned long long>(rec.seed), row.t, row.arm, row.inst_regret,
                    row.cum_regret);
      out += buf;
    }
  }
  return out;
}

void emit_outputs(const std::vector<RunRecord>& records, const std::string& output_dir,
                  bool plot) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + output_dir + "': " + ec.message());

  const std::string csv_path = output_dir + "/regret.csv";
  {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + csv_path + "'");
    out << regret_csv(records);
    if (!out) throw std::runtime_error("write failed for '" + csv_path + "'");
  }
  if (!plot) return;

  std::map<std::string, std::vector<RunRecord>> by_policy;
  for (const auto& r : records) by_policy[r.policy].push_back(r);
  std::vector<SvgSeries> series;
  for (const auto& [name, group] : by_policy) {
    SvgSeries s;
    s.label = name;
    for (const auto& point : aggregate(group)) {
      s.mean.push_back(point.mean);
      s.std_error.push_back(point.std_error);
    }
    series.push_back(std::move(s));
  }
  const std::string svg_path = output_dir + "/regret.svg";
  std::ofstream out(svg_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + svg_path + "'");
  out << render_regret_svg(series);
  if (!out) throw std::runtime_error("write failed for '" + svg_path + "'");
}

double w_coverage_failure_fraction(const CoverageConfig& cfg) {
  int failures = 0;
  for (int run = 0; run < cfg.runs; ++run) {
    Rng param_rng = Rng::derive(cfg.seed, 2 * static_cast<std::uint64_t>(run));
    const double half_width = 10.0;
    const double l_x = half_width * std::sqrt(static_cast<double>(cfg.d_x));
    const double l_z = l_x;
    const double sigma_eps = 0.1 * l_z;
    PhiMap phi = PhiMap::random_linear(cfg.d_x, cfg.d_z, l_x, l_z, param_rng);
    std::vector<Vec> theta(cfg.arms);
    std::vector<Vec> beta(cfg.arms);
    for (int a = 0; a < cfg.arms; ++a) {
      theta[a] = param_rng.sphere(cfg.d_x, 0.5);
      beta[a] = param_rng.sphere(cfg.d_z, 1.0);
    }
    ContextLaw law;
    law.half_width = half_width;
    const SyntheticEnv env(theta, beta, std::move(phi), law, sigma_eps, 0.1, false);

    const EnvTraits tr = traits_of(env);
    PolicyConfig pc;
    pc.lambda = 1.0;
    pc.delta = cfg.delta;
    pc.r_eta = env.r_eta();
    pc.l_u = std::sqrt(tr.l_x * tr.l_x + tr.l_z * tr.l_z);
    pc.l_eps = tr.l_eps;
    pc.horizon = cfg.horizon;
    LinearPhiConfig lc;
    lc.r_eps = sigma_eps;
    lc.l_x = l_x;
    PoLinUcb policy(cfg.arms, cfg.d_x, cfg.d_z, pc,
                    std::make_unique<LinearPhiEstimator>(cfg.d_x, cfg.d_z, lc));

    Rng env_rng = Rng::derive(cfg.seed, 2 * static_cast<std::uint64_t>(run) + 1);
    Rng policy_rng = Rng::derive(cfg.seed, 0x7fffffffULL + run);
    const int d_u = cfg.d_x + cfg.d_z;
    bool violated = false;
    for (long t = 1; t <= cfg.horizon && !violated; ++t) {
      const auto [x, z] = env.sample_round(env_rng);
      const int a = policy.select({x, z}, policy_rng);
      const double r = env.realized_reward(a, x, z, env_rng);
      policy.observe(a, x, z, r);

      Vec w_star(d_u);
      w_star.head(cfg.d_x) = env.theta_star(a);
      w_star.tail(cfg.d_z) = env.beta_star(a);
      const ArmModel& arm = policy.arm(a);
      const Vec diff = arm.ridge.solve() - w_star;
      const double deviation = std::sqrt(diff.dot(arm.ridge.gram() * diff));
      if (deviation > zeta(pc, arm.pulls(), d_u)) violated = true;
    }
    if (violated) ++failures;
  }
  return static_cast<double>(failures) / cfg.runs;
}

double phi_coverage_failure_fraction(const CoverageConfig& cfg) {
  int failures = 0;
  for (int trial = 0; trial < cfg.runs; ++trial) {
    Rng param_rng = Rng::derive(cfg.seed, 3 * static_cast<std::uint64_t>(trial));
    Rng data_rng = Rng::derive(cfg.seed, 3 * static_cast<std::uint64_t>(trial) + 1);
    const double half_width = 10.0;
    const double l_x = half_width * std::sqrt(static_cast<double>(cfg.d_x));
    const double l_z = l_x;
    const double sigma_eps = 0.1 * l_z;
    const double l_eps = 4.0 * sigma_eps * std::sqrt(static_cast<double>(cfg.d_z));
    const PhiMap phi = PhiMap::random_linear(cfg.d_x, cfg.d_z, l_x, l_z, param_rng);

    LinearPhiConfig lc;
    lc.r_eps = sigma_eps;
    lc.l_x = l_x;
    LinearPhiEstimator est(cfg.d_x, cfg.d_z, lc);
    for (long s = 0; s < cfg.horizon; ++s) {
      const Vec x = data_rng.uniform_box(cfg.d_x, half_width);
      Vec eps = data_rng.normal_vec(cfg.d_z, sigma_eps);
      while (eps.norm() > l_eps) eps = data_rng.normal_vec(cfg.d_z, sigma_eps);
      est.update(x, phi(x) + eps);
    }
    const Vec query = data_rng.uniform_box(cfg.d_x, half_width);
    const double err = (est.predict(query) - phi(query)).norm();
    if (err > est.radius(query, cfg.delta)) ++failures;
  }
  return static_cast<double>(failures) / cfg.runs;
}

}  // namespace pob
