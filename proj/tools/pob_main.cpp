#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "pob/config.hpp"
#include "pob/epl.hpp"
#include "pob/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitAssertion = 3;

int cmd_run(const std::string& config_path, int jobs, bool no_plot,
            const std::string& out_override, const std::string& features_override) {
  pob::ExperimentConfig cfg = pob::load_experiment_config(config_path);
  if (!features_override.empty()) {
    cfg.env.family = "replay";
    cfg.env.replay_path = features_override;
  }
  if (!out_override.empty()) cfg.output_dir = out_override;
  const auto records = pob::run_all(cfg, jobs);
  pob::emit_outputs(records, cfg.output_dir, !no_plot);

  for (const auto& spec : cfg.policies) {
    std::vector<pob::RunRecord> group;
    for (const auto& r : records) {
      if (r.policy == spec.name) group.push_back(r);
    }
    const auto curve = pob::aggregate(group);
    const double final_mean = curve.empty() ? 0.0 : curve.back().mean;
    const double final_se = curve.empty() ? 0.0 : curve.back().std_error;
    std::printf("%-22s final regret %.4g +- %.4g (%zu seeds)\n", spec.name.c_str(), final_mean,
                final_se, group.size());
  }
  std::printf("wrote %s/regret.csv%s\n", cfg.output_dir.c_str(),
              no_plot ? "" : " and regret.svg");
  return kExitOk;
}

int cmd_epl_verify(const std::string& config_path, const std::string& out_path) {
  const auto configs = pob::load_epl_configs(config_path);
  std::string csv = pob::epl_csv_header() + "\n";
  bool ok = true;
  for (const auto& cfg : configs) {
    const pob::EplResult result = pob::verify_gepl(cfg);
    csv += pob::epl_csv_row(result) + "\n";
    const bool zero_noise = cfg.l_eps == 0.0;
    const double allowed = zero_noise ? 0.0 : result.tolerance();
    if (result.failure_fraction() > allowed) ok = false;
  }
  std::fputs(csv.c_str(), stdout);
  if (!out_path.empty()) {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + out_path + "'");
    out << csv;
  }
  return ok ? kExitOk : kExitAssertion;
}

int cmd_coverage(const std::string& config_path) {
  const pob::CoverageConfig cfg = pob::load_coverage_config(config_path);
  double fraction = 0.0;
  double allowed = 0.0;
  if (cfg.kind == "w") {
    fraction = pob::w_coverage_failure_fraction(cfg);
    allowed = cfg.delta + 3.0 * std::sqrt(cfg.delta * (1.0 - cfg.delta) / cfg.runs);
  } else {
    fraction = pob::phi_coverage_failure_fraction(cfg);
    allowed = cfg.delta + 3.0 * std::sqrt(cfg.delta * (1.0 - cfg.delta) / cfg.runs);
  }
  std::printf("coverage kind=%s runs=%d failure_fraction=%.6g allowed=%.6g\n", cfg.kind.c_str(),
              cfg.runs, fraction, allowed);
  return fraction <= allowed ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear bandit simulations with post-serving contexts"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string out_file;
  std::string features_path;
  int jobs = 1;
  bool no_plot = false;

  auto* run = app.add_subcommand("run", "Run a seeded experiment and emit regret curves");
  run->add_option("--config", config_path, "experiment config (JSON)")->required();
  run->add_option("--jobs", jobs, "worker threads");
  run->add_flag("--no-plot", no_plot, "skip regret.svg");
  run->add_option("--out", out_dir, "output directory override");

  auto* epl = app.add_subcommand("epl-verify", "Monte Carlo checks of the potential inequality");
  epl->add_option("--config", config_path, "trial configs (JSON)")->required();
  epl->add_option("--out", out_file, "also write the CSV here");

  auto* coverage = app.add_subcommand("coverage", "Confidence-coverage Monte Carlo");
  coverage->add_option("--config", config_path, "coverage config (JSON)")->required();

  auto* replay = app.add_subcommand("replay", "Run policies against a feature table");
  replay->add_option("--features", features_path, "feature table file")->required();
  replay->add_option("--config", config_path, "experiment config (JSON)")->required();
  replay->add_option("--jobs", jobs, "worker threads");
  replay->add_flag("--no-plot", no_plot, "skip regret.svg");
  replay->add_option("--out", out_dir, "output directory override");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, jobs, no_plot, out_dir, "");
    if (epl->parsed()) return cmd_epl_verify(config_path, out_file);
    if (coverage->parsed()) return cmd_coverage(config_path);
    if (replay->parsed()) return cmd_run(config_path, jobs, no_plot, out_dir, features_path);
  } catch (const pob::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const pob::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitOk;
}
