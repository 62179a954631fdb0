#pragma once

// Seeded experiment runner: one trial draws a scenario and runs every
// requested method on it; Monte Carlo runs and sweeps fan trials out over a
// bounded worker pool and aggregate after a deterministic sort.

#include "isac/config.h"
#include "isac/scenario.h"
#include "isac/solver.h"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace isac::harness {

struct MetricsRecord {
  std::size_t sweep_index = 0;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  MethodId method = MethodId::imbo;
  bool ok = true;           // false: the method threw; metrics are NaN
  std::string message;      // error text when !ok
  double sum_rate_bps_hz = 0.0;
  double min_beampattern_margin_db = 0.0;  // min_n 10 log10(gain_n / Gamma_n)
  double max_violation = 0.0;              // max_n (Gamma_n - gain_n), watts
  double power = 0.0;                      // Tr(W W^H), watts
  bool sensing_feasible = false;  // max_violation <= feasibility_rtol * Gamma
  bool converged = true;          // IMBO convergence flag; true for baselines
  int fp_iterations = 0;
  int almo_iterations = 0;
  int rcg_iterations = 0;
  double wall_time_s = 0.0;
};

struct MethodOutcome {
  MetricsRecord record;
  CMatrix W;  // physical M x K beamformer; empty when the method failed
  std::optional<solver::SolveReport> report;  // IMBO only
};

struct TrialResult {
  std::size_t sweep_index = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  scenario::Scenario scenario;
  std::vector<MethodOutcome> outcomes;  // ordered IMBO, ZF, MMSE (as requested)

  const MethodOutcome* find(MethodId m) const;
};

/// Runs one trial of `point` (a config with its sweep value already applied)
/// seeded with `seed`. Solver failures are captured in the records.
TrialResult run_trial(const ExperimentConfig& point, std::size_t sweep_index,
                      double sweep_value, int trial, std::uint64_t seed);

/// One trial at the first sweep point with seed derive_seed(master_seed, 0, 0);
/// identical to trial 0 of monte_carlo.
TrialResult run_single(const ExperimentConfig& cfg);

struct Aggregate {
  std::size_t sweep_index = 0;
  double sweep_value = 0.0;
  MethodId method = MethodId::imbo;
  int trials = 0;    // successful trials
  int failures = 0;
  double mean_sum_rate = 0.0;
  double stderr_sum_rate = 0.0;  // sample standard deviation / sqrt(trials)
  double mean_min_margin_db = 0.0;
  double feasible_fraction = 0.0;
  double mean_power = 0.0;
  double mean_rcg_iterations = 0.0;
};

/// Aggregates records sharing one (sweep_index, method). Sums are
/// compensated, so the result does not depend on record order beyond
/// rounding of the final value.
Aggregate aggregate(const std::vector<MetricsRecord>& records);

struct RunOptions {
  unsigned threads = 1;     // 0: hardware concurrency
  bool keep_trials = false; // retain scenarios, beamformers and reports
};

struct MonteCarloResult {
  std::vector<MetricsRecord> records;     // sorted by (sweep, trial, method)
  std::vector<Aggregate> aggregates;      // sorted by (sweep, method)
  std::vector<TrialResult> trials;        // filled when keep_trials
  int failures = 0;
};

/// Raised when more than 10% of the method runs in an experiment fail.
class ExperimentAborted : public Error {
 public:
  using Error::Error;
};

/// cfg.trials trials at the first sweep point (or the base point when no
/// sweep is configured).
MonteCarloResult monte_carlo(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// cfg.trials trials at every sweep point. Requires cfg.sweep.
MonteCarloResult sweep(const ExperimentConfig& cfg, const RunOptions& opts = {});

/// Neumaier-compensated sum.
double compensated_sum(const std::vector<double>& xs);

}  // namespace isac::harness
