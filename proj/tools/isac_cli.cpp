// Command-line front end for the ISAC beamforming experiments.
//
//   isac_cli run         one trial, all methods; report, convergence trace, beampattern
//   isac_cli montecarlo  seeded trials with per-method aggregates
//   isac_cli sweep       Monte Carlo per sweep value (power or antennas)
//   isac_cli beampattern one trial; beampattern profiles of every method
//
// Exit codes: 0 success, 2 configuration error, 3 numeric failure, 4 I/O error.

#include "isac/config.h"
#include "isac/experiment.h"
#include "isac/output.h"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

namespace {

using namespace isac;
using namespace isac::harness;
namespace fs = std::filesystem;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> methods;
  std::string out_dir = "out";
  unsigned threads = 1;
  bool timing = false;
};

std::vector<MethodId> parse_method_list(const std::string& csv) {
  std::vector<MethodId> out;
  std::vector<std::string> errs;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    if (auto m = parse_method(item)) {
      out.push_back(*m);
    } else {
      errs.push_back("--methods: unknown method '" + item + "' (expected IMBO, ZF or MMSE)");
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
  return out;
}

ExperimentConfig build_config(const Options& o) {
  ExperimentConfig cfg = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
  if (o.seed) cfg.master_seed = *o.seed;
  if (o.trials) cfg.trials = *o.trials;
  if (o.methods) cfg.methods = parse_method_list(*o.methods);
  cfg.validate();
  return cfg;
}

std::vector<std::pair<std::string, CMatrix>> profiles_of(const TrialResult& tr) {
  std::vector<std::pair<std::string, CMatrix>> out;
  for (const auto& o : tr.outcomes) {
    if (o.record.ok) out.emplace_back(to_string(o.record.method), o.W);
  }
  return out;
}

void print_records(const std::vector<MetricsRecord>& recs) {
  for (const auto& r : recs) {
    if (r.ok) {
      std::printf("%-5s sum_rate=%.4f bps/Hz  min_margin=%+.3f dB  power=%.6g W\n",
                  to_string(r.method).c_str(), r.sum_rate_bps_hz, r.min_beampattern_margin_db,
                  r.power);
    } else {
      std::printf("%-5s failed: %s\n", to_string(r.method).c_str(), r.message.c_str());
    }
  }
}

void print_aggregates(const std::vector<Aggregate>& aggs) {
  for (const auto& a : aggs) {
    std::printf("point %zu (%g) %-5s mean=%.4f se=%.4f feasible=%.2f failures=%d\n",
                a.sweep_index, a.sweep_value, to_string(a.method).c_str(), a.mean_sum_rate,
                a.stderr_sum_rate, a.feasible_fraction, a.failures);
  }
}

int cmd_run(const Options& o, bool beampattern_only) {
  const auto cfg = build_config(o);
  const auto prov = provenance_of(cfg);
  const auto tr = run_single(cfg);
  const fs::path out = o.out_dir;
  const auto point = cfg.at_sweep_point(0);
  export_beampattern(profiles_of(tr), cfg.theta_grid_deg, point.gamma_th_dbm,
                     out / "beampattern.csv", prov);
  if (!beampattern_only) {
    std::vector<MetricsRecord> recs;
    for (const auto& m : tr.outcomes) recs.push_back(m.record);
    write_file(out / "records.csv", records_csv(recs, prov, o.timing));
    nlohmann::json body = {{"config", config_to_json(cfg)}};
    if (const auto* imbo = tr.find(MethodId::imbo); imbo && imbo->report) {
      body["imbo"] = report_json(*imbo->report, o.timing);
      write_file(out / "convergence.csv", convergence_csv(*imbo->report, prov));
    }
    write_file(out / "report.json", json_document(body, prov));
    print_records(recs);
  }
  std::printf("outputs written to %s\n", out.string().c_str());
  return 0;
}

int cmd_montecarlo(const Options& o, bool is_sweep) {
  const auto cfg = build_config(o);
  if (is_sweep && !cfg.sweep) throw ConfigError({"sweep: required for the sweep command"});
  const auto prov = provenance_of(cfg);
  RunOptions ro;
  ro.threads = o.threads;
  const auto res = is_sweep ? sweep(cfg, ro) : monte_carlo(cfg, ro);
  const fs::path out = o.out_dir;
  const std::string axis = cfg.sweep ? to_string(cfg.sweep->axis) : "power_dbm";
  write_file(out / "records.csv", records_csv(res.records, prov, o.timing));
  write_file(out / "aggregates.csv", aggregates_csv(res.aggregates, prov, axis));
  nlohmann::json body = {{"config", config_to_json(cfg)},
                         {"aggregates", aggregates_json(res.aggregates)},
                         {"failures", res.failures}};
  write_file(out / "summary.json", json_document(body, prov));
  print_aggregates(res.aggregates);
  std::printf("outputs written to %s\n", out.string().c_str());
  return 0;
}

void add_common(CLI::App* sub, Options& o, bool with_threads) {
  sub->add_option("--config", o.config_path, "JSON experiment configuration");
  sub->add_option("--seed", o.seed, "Master seed (overrides the config)");
  sub->add_option("--out", o.out_dir, "Output directory")->capture_default_str();
  sub->add_option("--trials", o.trials, "Number of trials (overrides the config)");
  sub->add_option("--methods", o.methods, "Comma-separated subset of IMBO,ZF,MMSE");
  if (with_threads) {
    sub->add_option("--threads", o.threads, "Worker threads (0: all cores)")
        ->capture_default_str();
  } else {
    sub->add_option("--threads", o.threads, "Accepted for uniformity; a single trial runs serially");
  }
  sub->add_flag("--timing", o.timing, "Include wall-clock timings (outputs become non-reproducible)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ISAC beamforming by Riemannian manifold optimization"};
  app.require_subcommand(1);
  Options o;
  auto* run = app.add_subcommand("run", "Single trial: records, IMBO report, convergence, beampattern");
  auto* mc = app.add_subcommand("montecarlo", "Seeded Monte Carlo trials with aggregates");
  auto* sw = app.add_subcommand("sweep", "Monte Carlo per value of the configured sweep axis");
  auto* bp = app.add_subcommand("beampattern", "Single trial beampattern profiles of every method");
  add_common(run, o, false);
  add_common(mc, o, true);
  add_common(sw, o, true);
  add_common(bp, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o, false);
    if (bp->parsed()) return cmd_run(o, true);
    if (mc->parsed()) return cmd_montecarlo(o, false);
    if (sw->parsed()) return cmd_montecarlo(o, true);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const isac::Error& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return 0;
}
