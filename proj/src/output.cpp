#include "isac/output.h"

#include "isac/problem.h"
#include "isac/scenario.h"

#include <charconv>
#include <cmath>
#include <fstream>

namespace isac::harness {

using nlohmann::json;

Provenance provenance_of(const ExperimentConfig& cfg) {
  return {config_hash_hex(cfg), cfg.master_seed};
}

std::string provenance_line(const Provenance& p) {
  return "# config_sha=" + p.config_sha + " seed=" + std::to_string(p.seed) + "\r\n";
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

namespace {

// Rows end in CRLF as RFC 4180 prescribes.
constexpr const char* kEol = "\r\n";

std::string row(const std::vector<std::string>& cells) {
  std::string out;
  bool first = true;
  for (const auto& c : cells) {
    if (!first) out += ',';
    out += csv_field(c);
    first = false;
  }
  return out + kEol;
}

std::string num(double x) { return format_number(x); }
std::string num(int x) { return std::to_string(x); }
std::string num(std::size_t x) { return std::to_string(x); }
std::string flag(bool b) { return b ? "1" : "0"; }

}  // namespace

std::string records_csv(const std::vector<MetricsRecord>& records, const Provenance& p,
                        bool timing) {
  std::string out = provenance_line(p);
  std::vector<std::string> head{"sweep_index", "sweep_value", "trial", "seed", "method",
                                "status", "sum_rate_bps_hz", "min_beampattern_margin_db",
                                "max_violation", "power", "sensing_feasible", "converged",
                                "fp_iterations", "almo_iterations", "rcg_iterations"};
  if (timing) head.push_back("wall_time_s");
  head.push_back("message");
  out += row(head);
  for (const auto& r : records) {
    std::vector<std::string> cells{
        num(r.sweep_index), num(r.sweep_value), num(r.trial), num(r.seed),
        to_string(r.method), r.ok ? "ok" : "failed", num(r.sum_rate_bps_hz),
        num(r.min_beampattern_margin_db), num(r.max_violation), num(r.power),
        flag(r.sensing_feasible), flag(r.converged), num(r.fp_iterations),
        num(r.almo_iterations), num(r.rcg_iterations)};
    if (timing) cells.push_back(num(r.wall_time_s));
    cells.push_back(r.message);
    out += row(cells);
  }
  return out;
}

std::string aggregates_csv(const std::vector<Aggregate>& aggs, const Provenance& p,
                           const std::string& sweep_axis) {
  std::string out = provenance_line(p);
  out += row({"sweep_index", sweep_axis, "method", "trials", "failures", "mean_sum_rate",
              "stderr_sum_rate", "mean_min_margin_db", "feasible_fraction", "mean_power",
              "mean_rcg_iterations"});
  for (const auto& a : aggs) {
    out += row({num(a.sweep_index), num(a.sweep_value), to_string(a.method), num(a.trials),
                num(a.failures), num(a.mean_sum_rate), num(a.stderr_sum_rate),
                num(a.mean_min_margin_db), num(a.feasible_fraction), num(a.mean_power),
                num(a.mean_rcg_iterations)});
  }
  return out;
}

std::string convergence_csv(const solver::SolveReport& report, const Provenance& p) {
  std::string out = provenance_line(p);
  out += row({"fp_round", "objective", "objective_change", "sum_rate", "max_violation", "rho",
              "eps", "distance", "almo_rounds", "rcg_iterations"});
  for (const auto& r : report.outer_trace) {
    out += row({num(r.round), num(r.objective), num(r.objective_change), num(r.sum_rate),
                num(r.max_violation), num(r.rho), num(r.eps), num(r.distance),
                num(r.almo_rounds), num(r.rcg_iterations)});
  }
  return out;
}

std::string beampattern_csv(const std::vector<std::pair<std::string, CMatrix>>& profiles,
                            const std::vector<double>& grid_deg, double gamma_th_dbm,
                            const Provenance& p) {
  for (double t : grid_deg) {
    if (!(t >= -90.0 && t <= 90.0)) {
      throw DomainError("beampattern grid angle " + format_number(t) + " outside [-90, 90]");
    }
  }
  std::string out = provenance_line(p);
  std::string head = "theta_deg";
  for (const auto& [name, w] : profiles) {
    head += "," + csv_field(profiles.size() == 1 && name.empty() ? "gain_dbm"
                                                                   : "gain_dbm_" + name);
  }
  out += head + ",gamma_th_dbm" + kEol;
  const std::string th = num(gamma_th_dbm);
  for (double t : grid_deg) {
    std::string line = num(t);
    const double rad = scenario::deg_to_rad(t);
    for (const auto& [name, w] : profiles) {
      line += "," + num(scenario::watts_to_dbm(problem::beampattern_gain(w, rad)));
    }
    out += line + "," + th + kEol;
  }
  return out;
}

void export_beampattern(const std::vector<std::pair<std::string, CMatrix>>& profiles,
                        const std::vector<double>& grid_deg, double gamma_th_dbm,
                        const std::filesystem::path& path, const Provenance& p) {
  write_file(path, beampattern_csv(profiles, grid_deg, gamma_th_dbm, p));
}

void export_beampattern(const CMatrix& w, const std::vector<double>& grid_deg,
                        double gamma_th_dbm, const std::filesystem::path& path,
                        const Provenance& p) {
  export_beampattern({{"", w}}, grid_deg, gamma_th_dbm, path, p);
}

json report_json(const solver::SolveReport& r, bool timing) {
  json outer = json::array();
  for (const auto& f : r.outer_trace) {
    outer.push_back({{"round", f.round},
                     {"objective", f.objective},
                     {"objective_change", f.objective_change},
                     {"sum_rate", f.sum_rate},
                     {"max_violation", f.max_violation},
                     {"rho", f.rho},
                     {"lambda", std::vector<double>(f.lambda.data(), f.lambda.data() + f.lambda.size())},
                     {"eps", f.eps},
                     {"distance", f.distance},
                     {"almo_rounds", f.almo_rounds},
                     {"rcg_iterations", f.rcg_iterations}});
  }
  json almo = json::array();
  for (const auto& a : r.almo_trace) {
    almo.push_back({{"fp_round", a.fp_round},
                    {"round", a.round},
                    {"objective", a.objective},
                    {"sum_rate", a.sum_rate},
                    {"max_violation", a.max_violation},
                    {"rho", a.rho},
                    {"lambda", std::vector<double>(a.lambda.data(), a.lambda.data() + a.lambda.size())},
                    {"eps", a.eps},
                    {"distance", a.distance},
                    {"lagrangian_before", a.lagrangian_before},
                    {"lagrangian_after", a.lagrangian_after},
                    {"grad_norm", a.grad_norm},
                    {"rcg_iterations", a.rcg_iterations},
                    {"rcg_stop", solver::to_string(a.rcg_stop)}});
  }
  json out = {{"converged", r.converged},
              {"stop_reason", solver::to_string(r.reason)},
              {"feasible", r.feasible},
              {"max_violation", r.max_violation},
              {"final_sum_rate", r.final_sum_rate},
              {"fp_iterations", r.fp_iterations},
              {"almo_iterations", r.almo_iterations},
              {"rcg_iterations", r.rcg_iterations},
              {"outer_trace", outer},
              {"almo_trace", almo}};
  if (timing) out["wall_time_s"] = r.wall_time;
  return out;
}

json aggregates_json(const std::vector<Aggregate>& aggs) {
  json out = json::array();
  for (const auto& a : aggs) {
    out.push_back({{"sweep_index", a.sweep_index},
                   {"sweep_value", a.sweep_value},
                   {"method", to_string(a.method)},
                   {"trials", a.trials},
                   {"failures", a.failures},
                   {"mean_sum_rate", a.mean_sum_rate},
                   {"stderr_sum_rate", a.stderr_sum_rate},
                   {"mean_min_margin_db", a.mean_min_margin_db},
                   {"feasible_fraction", a.feasible_fraction},
                   {"mean_power", a.mean_power},
                   {"mean_rcg_iterations", a.mean_rcg_iterations}});
  }
  return out;
}

void write_file(const std::filesystem::path& path, std::string_view content) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " +
                          ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) throw IoError("failed writing " + path.string());
}

std::string json_document(json body, const Provenance& p) {
  body["provenance"] = {{"config_sha", p.config_sha}, {"seed", p.seed}};
  return body.dump(2) + "\n";
}

}  // namespace isac::harness
