#include "isac/experiment.h"

#include "isac/baselines.h"
#include "isac/problem.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace isac::harness {
namespace {

constexpr MethodId kAllMethods[] = {MethodId::imbo, MethodId::zf, MethodId::mmse};

void fill_metrics(MetricsRecord& rec, const scenario::Scenario& s, const CMatrix& w,
                  double rtol) {
  rec.sum_rate_bps_hz = problem::sum_rate_physical(s.H, w, s.sigma2);
  rec.power = w.squaredNorm();
  double margin = std::numeric_limits<double>::infinity();
  double viol = -std::numeric_limits<double>::infinity();
  bool feasible = true;
  for (std::size_t n = 0; n < s.sensing_rad.size(); ++n) {
    const double gain = problem::beampattern_gain(w, s.sensing_rad[n]);
    const double floor = s.gamma_th(static_cast<Index>(n));
    margin = std::min(margin, 10.0 * std::log10(gain / floor));
    viol = std::max(viol, floor - gain);
    if (floor - gain > rtol * floor) feasible = false;
  }
  rec.min_beampattern_margin_db = margin;
  rec.max_violation = viol;
  rec.sensing_feasible = feasible;
}

void mark_failed(MetricsRecord& rec, const std::string& what) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  rec.ok = false;
  rec.message = what;
  rec.sum_rate_bps_hz = nan;
  rec.min_beampattern_margin_db = nan;
  rec.max_violation = nan;
  rec.power = nan;
  rec.sensing_feasible = false;
  rec.converged = false;
}

MethodOutcome run_method(MethodId method, const ExperimentConfig& cfg,
                         const scenario::Scenario& s, std::mt19937_64& rng) {
  MethodOutcome out;
  auto& rec = out.record;
  rec.method = method;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    switch (method) {
      case MethodId::imbo: {
        const problem::ProblemSpec spec(scenario::lift(s));
        auto res = solver::imbo(spec, cfg.solver, rng);
        out.W = std::move(res.W);
        rec.converged = res.report.converged;
        rec.fp_iterations = res.report.fp_iterations;
        rec.almo_iterations = res.report.almo_iterations;
        rec.rcg_iterations = res.report.rcg_iterations;
        out.report = std::move(res.report);
        break;
      }
      case MethodId::zf:
        out.W = baselines::zf_beamformer(s.H, s.p_max).W;
        break;
      case MethodId::mmse:
        out.W = baselines::mmse_beamformer(s.H, s.sigma2, s.p_max).W;
        break;
    }
    fill_metrics(rec, s, out.W, cfg.solver.feasibility_rtol);
  } catch (const NumericError& e) {
    mark_failed(rec, e.what());
  } catch (const SingularityError& e) {
    mark_failed(rec, e.what());
  }
  rec.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

double mean_of(const std::vector<double>& xs) {
  return xs.empty() ? std::numeric_limits<double>::quiet_NaN()
                    : compensated_sum(xs) / static_cast<double>(xs.size());
}

struct Task {
  std::size_t sweep_index;
  int trial;
};

MonteCarloResult run_tasks(const ExperimentConfig& cfg, const std::vector<Task>& tasks,
                           const RunOptions& opts) {
  std::vector<ExperimentConfig> points;
  for (std::size_t i = 0; i < cfg.sweep_points(); ++i) {
    points.push_back(cfg.at_sweep_point(i));
    points.back().validate();
  }

  std::vector<std::optional<TrialResult>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      slots[i] = run_trial(points[t.sweep_index], t.sweep_index, cfg.sweep_value(t.sweep_index),
                           t.trial,
                           derive_seed(cfg.master_seed, static_cast<std::uint64_t>(t.trial),
                                       t.sweep_index));
    }
  };
  unsigned n_threads = opts.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                         : opts.threads;
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, tasks.size()));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }

  MonteCarloResult out;
  for (auto& slot : slots) {
    for (const auto& o : slot->outcomes) {
      out.records.push_back(o.record);
      if (!o.record.ok) ++out.failures;
    }
    if (opts.keep_trials) out.trials.push_back(std::move(*slot));
  }
  std::stable_sort(out.records.begin(), out.records.end(),
                   [](const MetricsRecord& a, const MetricsRecord& b) {
                     if (a.sweep_index != b.sweep_index) return a.sweep_index < b.sweep_index;
                     if (a.trial != b.trial) return a.trial < b.trial;
                     return a.method < b.method;
                   });
  std::stable_sort(out.trials.begin(), out.trials.end(),
                   [](const TrialResult& a, const TrialResult& b) {
                     if (a.sweep_index != b.sweep_index) return a.sweep_index < b.sweep_index;
                     return a.trial < b.trial;
                   });

  const std::size_t runs = out.records.size();
  if (runs > 0 && static_cast<double>(out.failures) > 0.1 * static_cast<double>(runs)) {
    std::string msg = "experiment aborted: " + std::to_string(out.failures) + " of " +
                      std::to_string(runs) + " method runs failed";
    for (const auto& r : out.records) {
      if (!r.ok) {
        msg += "; first failure: " + to_string(r.method) + " trial " +
               std::to_string(r.trial) + ": " + r.message;
        break;
      }
    }
    throw ExperimentAborted(msg);
  }

  for (std::size_t p = 0; p < cfg.sweep_points(); ++p) {
    for (MethodId m : kAllMethods) {
      if (!cfg.has_method(m)) continue;
      std::vector<MetricsRecord> group;
      for (const auto& r : out.records) {
        if (r.sweep_index == p && r.method == m) group.push_back(r);
      }
      if (!group.empty()) out.aggregates.push_back(aggregate(group));
    }
  }
  return out;
}

}  // namespace

const MethodOutcome* TrialResult::find(MethodId m) const {
  for (const auto& o : outcomes) {
    if (o.record.method == m) return &o;
  }
  return nullptr;
}

TrialResult run_trial(const ExperimentConfig& point, std::size_t sweep_index,
                      double sweep_value, int trial, std::uint64_t seed) {
  TrialResult tr;
  tr.sweep_index = sweep_index;
  tr.trial = trial;
  tr.seed = seed;
  std::mt19937_64 rng(seed);
  tr.scenario = scenario::sample_channels(point.geometry, point.M, point.K, point.budget(), rng);
  for (MethodId m : kAllMethods) {
    if (!point.has_method(m)) continue;
    auto o = run_method(m, point, tr.scenario, rng);
    o.record.sweep_index = sweep_index;
    o.record.sweep_value = sweep_value;
    o.record.trial = trial;
    o.record.seed = seed;
    tr.outcomes.push_back(std::move(o));
  }
  return tr;
}

TrialResult run_single(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto point = cfg.at_sweep_point(0);
  point.validate();
  return run_trial(point, 0, cfg.sweep_value(0), 0, derive_seed(cfg.master_seed, 0, 0));
}

double compensated_sum(const std::vector<double>& xs) {
  double sum = 0.0;
  double comp = 0.0;
  for (double x : xs) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

Aggregate aggregate(const std::vector<MetricsRecord>& records) {
  Aggregate a;
  if (records.empty()) return a;
  a.sweep_index = records.front().sweep_index;
  a.sweep_value = records.front().sweep_value;
  a.method = records.front().method;
  std::vector<double> rate, margin, power, rcg, feas;
  for (const auto& r : records) {
    if (r.sweep_index != a.sweep_index || r.method != a.method) {
      throw DomainError("aggregate: records span more than one (sweep point, method)");
    }
    if (!r.ok) {
      ++a.failures;
      continue;
    }
    rate.push_back(r.sum_rate_bps_hz);
    margin.push_back(r.min_beampattern_margin_db);
    power.push_back(r.power);
    rcg.push_back(static_cast<double>(r.rcg_iterations));
    feas.push_back(r.sensing_feasible ? 1.0 : 0.0);
  }
  a.trials = static_cast<int>(rate.size());
  a.mean_sum_rate = mean_of(rate);
  a.mean_min_margin_db = mean_of(margin);
  a.mean_power = mean_of(power);
  a.mean_rcg_iterations = mean_of(rcg);
  a.feasible_fraction = mean_of(feas);
  if (a.trials > 1) {
    std::vector<double> sq;
    sq.reserve(rate.size());
    for (double x : rate) sq.push_back((x - a.mean_sum_rate) * (x - a.mean_sum_rate));
    const double var = compensated_sum(sq) / static_cast<double>(a.trials - 1);
    a.stderr_sum_rate = std::sqrt(var / static_cast<double>(a.trials));
  }
  return a;
}

MonteCarloResult monte_carlo(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  ExperimentConfig single = cfg.at_sweep_point(0);
  single.sweep.reset();
  std::vector<Task> tasks;
  for (int t = 0; t < cfg.trials; ++t) tasks.push_back({0, t});
  auto out = run_tasks(single, tasks, opts);
  // Report the swept value when a sweep was configured.
  const double v = cfg.sweep_value(0);
  for (auto& r : out.records) r.sweep_value = v;
  for (auto& a : out.aggregates) a.sweep_value = v;
  return out;
}

MonteCarloResult sweep(const ExperimentConfig& cfg, const RunOptions& opts) {
  cfg.validate();
  if (!cfg.sweep) throw ConfigError({"sweep: required for a sweep run"});
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < cfg.sweep_points(); ++p) {
    for (int t = 0; t < cfg.trials; ++t) tasks.push_back({p, t});
  }
  return run_tasks(cfg, tasks, opts);
}

}  // namespace isac::harness
