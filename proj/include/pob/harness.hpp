#pragma once

#include <functional>
#include <iosfwd>
#include <memory>

#include "pob/config.hpp"
#include "pob/environment.hpp"
#include "pob/policies.hpp"

namespace pob {

struct RoundLog {
  long t = 0;  // 1-based round index
  int arm = 0;
  double inst_regret = 0.0;
  double cum_regret = 0.0;
};

struct RunRecord {
  std::string policy;
  std::uint64_t seed = 0;
  std::vector<RoundLog> rounds;
  double wall_time_sec = 0.0;

  [[nodiscard]] double final_regret() const {
    return rounds.empty() ? 0.0 : rounds.back().cum_regret;
  }
  /// Cumulative regret after round t (1-based); 0 for t == 0.
  [[nodiscard]] double regret_at(long t) const;
};

/// Test seam: invoked before each selection with the 1-based round index and
/// the policy about to act, so state visible to the decision can be audited.
struct RunHooks {
  std::function<void(long, const BanditPolicy&)> pre_select;
};

/// Executes one seeded run of the named policy on the configured environment:
/// observe x, select, reveal (z, reward), update. Pseudo-regret is scored
/// against the mean-reward benchmark (replay: the best fixed item for the
/// sampled user).
RunRecord run_experiment(const ExperimentConfig& cfg, const PolicySpec& spec,
                         std::uint64_t seed, const RunHooks* hooks = nullptr);

struct CurvePoint {
  long t = 0;
  double mean = 0.0;
  double std_error = 0.0;
};

/// Pointwise mean and standard error (sample std / sqrt(runs)) of cumulative
/// regret across same-horizon records.
std::vector<CurvePoint> aggregate(const std::vector<RunRecord>& records);

/// Runs every (policy, seed) pair, fanned across `jobs` workers. Output order
/// is deterministic: config policy order, then seed order.
std::vector<RunRecord> run_all(const ExperimentConfig& cfg, int jobs = 1);

/// header `policy,seed,t,arm,inst_regret,cum_regret`; rows sorted by
/// (policy, seed, t); floats at 9 significant digits; LF endings.
std::string regret_csv(std::vector<RunRecord> records);

/// Writes regret.csv (and regret.svg unless plot is false) under output_dir.
void emit_outputs(const std::vector<RunRecord>& records, const std::string& output_dir,
                  bool plot = true);

/// Fraction of seeded runs in which the fitted parameter ever leaves its
/// ellipsoid: |w_hat - w*|_A > zeta for the pulled arm at any round.
double w_coverage_failure_fraction(const CoverageConfig& cfg);

/// Fraction of trials in which a fresh query lands outside the phi radius
/// after `horizon` fitted samples on a linear ground truth.
double phi_coverage_failure_fraction(const CoverageConfig& cfg);

}  // namespace pob
