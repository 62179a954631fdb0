#include "isac/config.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace isac::harness {
namespace {

using nlohmann::json;

// Reads the members of one JSON object, recording type errors and, on
// finish(), every key that was never consumed.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path, std::vector<std::string>& errs)
      : j_(j), path_(std::move(path)), errs_(errs) {
    if (!j_.is_object()) {
      errs_.push_back(where() + ": expected an object");
      ok_ = false;
    }
  }

  bool ok() const { return ok_; }

  const json* take(const std::string& key) {
    if (!ok_) return nullptr;
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (v->is_number()) {
        out = v->get<double>();
      } else {
        errs_.push_back(field(key) + ": expected a number");
      }
    }
  }

  void read(const std::string& key, int& out) {
    if (const json* v = take(key)) {
      if (v->is_number_integer() && v->get<std::int64_t>() >= INT32_MIN &&
          v->get<std::int64_t>() <= INT32_MAX) {
        out = static_cast<int>(v->get<std::int64_t>());
      } else {
        errs_.push_back(field(key) + ": expected an integer");
      }
    }
  }

  void read(const std::string& key, std::uint64_t& out) {
    if (const json* v = take(key)) {
      if (v->is_number_unsigned()) {
        out = v->get<std::uint64_t>();
      } else {
        errs_.push_back(field(key) + ": expected a non-negative integer");
      }
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) {
        errs_.push_back(field(key) + ": expected an array of numbers");
        return;
      }
      std::vector<double> vals;
      for (const auto& e : *v) {
        if (!e.is_number()) {
          errs_.push_back(field(key) + ": expected an array of numbers");
          return;
        }
        vals.push_back(e.get<double>());
      }
      out = std::move(vals);
    }
  }

  void read(const std::string& key, std::array<double, 2>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() ||
          !(*v)[1].is_number()) {
        errs_.push_back(field(key) + ": expected [x, y]");
        return;
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }

  const json* read_string(const std::string& key) {
    const json* v = take(key);
    if (v && !v->is_string()) {
      errs_.push_back(field(key) + ": expected a string");
      return nullptr;
    }
    return v;
  }

  void finish() {
    if (!ok_) return;
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) errs_.push_back(field(it.key()) + ": unknown key");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::vector<std::string>& errs_;
  std::set<std::string> seen_;
  bool ok_ = true;
};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void read_geometry(const json& j, scenario::GeometryConfig& g, std::vector<std::string>& errs) {
  ObjectReader r(j, "geometry", errs);
  r.read("bs_position", g.bs_position);
  r.read("user_region_center", g.user_region_center);
  r.read("user_region_radius", g.user_region_radius);
  r.read("user_angles_deg", g.user_angles_deg);
  r.read("sensing_angles_deg", g.sensing_angles_deg);
  r.read("C0_db", g.C0_db);
  r.read("D0", g.D0);
  r.read("nu", g.nu);
  if (const json* v = r.read_string("user_placement")) {
    const auto s = v->get<std::string>();
    if (s == "fixed") {
      g.placement = scenario::UserPlacement::fixed;
    } else if (s == "random_disk") {
      g.placement = scenario::UserPlacement::random_disk;
    } else {
      errs.push_back("geometry.user_placement: expected \"fixed\" or \"random_disk\"");
    }
  }
  r.finish();
}

void read_solver(const json& j, solver::ImboConfig& s, std::vector<std::string>& errs) {
  ObjectReader r(j, "solver", errs);
  if (const json* v = r.take("rcg")) {
    ObjectReader q(*v, "solver.rcg", errs);
    q.read("delta1", s.rcg.delta1);
    q.read("max_iters", s.rcg.max_iters);
    q.read("armijo_c1", s.rcg.armijo_c1);
    q.read("armijo_shrink", s.rcg.armijo_shrink);
    q.read("alpha_init", s.rcg.alpha_init);
    q.read("max_backtracks", s.rcg.max_backtracks);
    q.finish();
  }
  if (const json* v = r.take("almo")) {
    ObjectReader q(*v, "solver.almo", errs);
    q.read("eps0", s.almo.eps0);
    q.read("eps_min", s.almo.eps_min);
    q.read("theta_eps", s.almo.theta_eps);
    q.read("theta_rho", s.almo.theta_rho);
    q.read("rho0", s.almo.rho0);
    q.read("tau", s.almo.tau);
    q.read("d_min", s.almo.d_min);
    q.read("lambda_min", s.almo.lambda_min);
    q.read("lambda_max", s.almo.lambda_max);
    q.read("lambda0", s.almo.lambda0);
    q.read("max_outer", s.almo.max_outer);
    q.finish();
  }
  r.read("delta2", s.delta2);
  r.read("max_fp_iters", s.max_fp_iters);
  r.read("feasibility_rtol", s.feasibility_rtol);
  if (const json* v = r.read_string("init")) {
    const auto m = v->get<std::string>();
    if (m == "mmse") {
      s.init = solver::InitMode::mmse;
    } else if (m == "random") {
      s.init = solver::InitMode::random;
    } else {
      errs.push_back("solver.init: expected \"mmse\" or \"random\"");
    }
  }
  r.finish();
}

void read_sweep(const json& j, std::optional<SweepConfig>& out, std::vector<std::string>& errs) {
  if (j.is_null()) {
    out.reset();
    return;
  }
  ObjectReader r(j, "sweep", errs);
  SweepConfig sw;
  bool have_axis = false;
  if (const json* v = r.read_string("axis")) {
    const auto a = v->get<std::string>();
    have_axis = true;
    if (a == "power_dbm") {
      sw.axis = SweepAxis::power_dbm;
    } else if (a == "antennas") {
      sw.axis = SweepAxis::antennas;
    } else {
      errs.push_back("sweep.axis: expected \"power_dbm\" or \"antennas\"");
    }
  } else if (r.ok()) {
    errs.push_back("sweep.axis: required");
  }
  r.read("values", sw.values);
  r.finish();
  if (have_axis) out = std::move(sw);
}

void collect(std::vector<std::string>& errs, const auto& fn) {
  try {
    fn();
  } catch (const ConfigError& e) {
    errs.insert(errs.end(), e.problems().begin(), e.problems().end());
  }
}

std::string init_name(solver::InitMode m) {
  return m == solver::InitMode::mmse ? "mmse" : "random";
}

}  // namespace

std::string to_string(MethodId m) {
  switch (m) {
    case MethodId::imbo: return "IMBO";
    case MethodId::zf: return "ZF";
    case MethodId::mmse: return "MMSE";
  }
  return "?";
}

std::optional<MethodId> parse_method(const std::string& name) {
  const auto s = lower(name);
  if (s == "imbo") return MethodId::imbo;
  if (s == "zf") return MethodId::zf;
  if (s == "mmse") return MethodId::mmse;
  return std::nullopt;
}

std::string to_string(SweepAxis a) {
  return a == SweepAxis::power_dbm ? "power_dbm" : "antennas";
}

std::vector<double> default_theta_grid() {
  std::vector<double> g;
  g.reserve(361);
  for (int i = 0; i <= 360; ++i) g.push_back(-90.0 + 0.5 * i);
  return g;
}

void ExperimentConfig::validate() const {
  std::vector<std::string> errs;
  collect(errs, [&] { geometry.validate(); });
  collect(errs, [&] { solver.validate(); });
  if (M < 1) errs.push_back("M: must be >= 1");
  if (K < 1) errs.push_back("K: must be >= 1");
  if (N < 1) errs.push_back("N: must be >= 1");
  if (N != static_cast<int>(geometry.sensing_angles_deg.size())) {
    errs.push_back("N: must equal the number of geometry.sensing_angles_deg (" +
                   std::to_string(geometry.sensing_angles_deg.size()) + ")");
  }
  if (geometry.placement == scenario::UserPlacement::fixed &&
      K > static_cast<int>(geometry.user_angles_deg.size())) {
    errs.push_back("K: exceeds the number of geometry.user_angles_deg for fixed placement");
  }
  if (!std::isfinite(sigma2_dbm)) errs.push_back("sigma2_dbm: must be finite");
  if (!std::isfinite(p_max_dbm)) errs.push_back("p_max_dbm: must be finite");
  if (!std::isfinite(gamma_th_dbm)) errs.push_back("gamma_th_dbm: must be finite");
  if (trials < 1) errs.push_back("trials: must be >= 1");
  if (methods.empty()) errs.push_back("methods: must name at least one of IMBO, ZF, MMSE");
  {
    std::set<MethodId> uniq(methods.begin(), methods.end());
    if (uniq.size() != methods.size()) errs.push_back("methods: duplicate entries");
  }
  if (theta_grid_deg.empty()) errs.push_back("theta_grid_deg: must not be empty");
  for (double t : theta_grid_deg) {
    if (!(t >= -90.0 && t <= 90.0)) {
      errs.push_back("theta_grid_deg: every angle must lie in [-90, 90]");
      break;
    }
  }
  if (sweep) {
    if (sweep->values.empty()) errs.push_back("sweep.values: must not be empty");
    for (double v : sweep->values) {
      if (!std::isfinite(v)) {
        errs.push_back("sweep.values: must be finite");
        break;
      }
      if (sweep->axis == SweepAxis::antennas && (v < 1.0 || v != std::floor(v))) {
        errs.push_back("sweep.values: antenna counts must be positive integers");
        break;
      }
    }
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

scenario::LinkBudget ExperimentConfig::budget() const {
  return {scenario::dbm_to_watts(sigma2_dbm), scenario::dbm_to_watts(p_max_dbm),
          scenario::dbm_to_watts(gamma_th_dbm)};
}

bool ExperimentConfig::has_method(MethodId m) const {
  return std::find(methods.begin(), methods.end(), m) != methods.end();
}

std::size_t ExperimentConfig::sweep_points() const {
  return sweep ? sweep->values.size() : 1;
}

double ExperimentConfig::sweep_value(std::size_t index) const {
  if (index >= sweep_points()) throw IndexError("sweep_value: index out of range");
  return sweep ? sweep->values[index] : p_max_dbm;
}

ExperimentConfig ExperimentConfig::at_sweep_point(std::size_t index) const {
  ExperimentConfig c = *this;
  if (!sweep) {
    if (index != 0) throw IndexError("at_sweep_point: index out of range");
    return c;
  }
  const double v = sweep_value(index);
  if (sweep->axis == SweepAxis::power_dbm) {
    c.p_max_dbm = v;
  } else {
    c.M = static_cast<int>(v);
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig cfg;
  std::vector<std::string> errs;
  ObjectReader r(j, "", errs);
  if (const json* v = r.take("geometry")) read_geometry(*v, cfg.geometry, errs);
  r.read("M", cfg.M);
  r.read("K", cfg.K);
  r.read("N", cfg.N);
  r.read("sigma2_dbm", cfg.sigma2_dbm);
  r.read("p_max_dbm", cfg.p_max_dbm);
  r.read("gamma_th_dbm", cfg.gamma_th_dbm);
  if (const json* v = r.take("solver")) read_solver(*v, cfg.solver, errs);
  r.read("trials", cfg.trials);
  r.read("master_seed", cfg.master_seed);
  if (const json* v = r.take("sweep")) read_sweep(*v, cfg.sweep, errs);
  if (const json* v = r.take("methods")) {
    if (!v->is_array()) {
      errs.push_back("methods: expected an array of method names");
    } else {
      cfg.methods.clear();
      for (const auto& e : *v) {
        auto m = e.is_string() ? parse_method(e.get<std::string>()) : std::nullopt;
        if (!m) {
          errs.push_back("methods: unknown method " + e.dump() + " (expected IMBO, ZF or MMSE)");
        } else {
          cfg.methods.push_back(*m);
        }
      }
    }
  }
  r.read("theta_grid_deg", cfg.theta_grid_deg);
  r.finish();
  if (!errs.empty()) throw ConfigError(std::move(errs));
  cfg.validate();
  return cfg;
}

json config_to_json(const ExperimentConfig& c) {
  const auto& g = c.geometry;
  json geo = {
      {"bs_position", g.bs_position},
      {"user_region_center", g.user_region_center},
      {"user_region_radius", g.user_region_radius},
      {"user_angles_deg", g.user_angles_deg},
      {"sensing_angles_deg", g.sensing_angles_deg},
      {"C0_db", g.C0_db},
      {"D0", g.D0},
      {"nu", g.nu},
      {"user_placement",
       g.placement == scenario::UserPlacement::fixed ? "fixed" : "random_disk"},
  };
  const auto& s = c.solver;
  json sol = {
      {"rcg",
       {{"delta1", s.rcg.delta1},
        {"max_iters", s.rcg.max_iters},
        {"armijo_c1", s.rcg.armijo_c1},
        {"armijo_shrink", s.rcg.armijo_shrink},
        {"alpha_init", s.rcg.alpha_init},
        {"max_backtracks", s.rcg.max_backtracks}}},
      {"almo",
       {{"eps0", s.almo.eps0},
        {"eps_min", s.almo.eps_min},
        {"theta_eps", s.almo.theta_eps},
        {"theta_rho", s.almo.theta_rho},
        {"rho0", s.almo.rho0},
        {"tau", s.almo.tau},
        {"d_min", s.almo.d_min},
        {"lambda_min", s.almo.lambda_min},
        {"lambda_max", s.almo.lambda_max},
        {"lambda0", s.almo.lambda0},
        {"max_outer", s.almo.max_outer}}},
      {"delta2", s.delta2},
      {"max_fp_iters", s.max_fp_iters},
      {"feasibility_rtol", s.feasibility_rtol},
      {"init", init_name(s.init)},
  };
  json methods = json::array();
  for (auto m : c.methods) methods.push_back(to_string(m));
  json sweep = nullptr;
  if (c.sweep) sweep = {{"axis", to_string(c.sweep->axis)}, {"values", c.sweep->values}};
  return {
      {"geometry", geo},
      {"M", c.M},
      {"K", c.K},
      {"N", c.N},
      {"sigma2_dbm", c.sigma2_dbm},
      {"p_max_dbm", c.p_max_dbm},
      {"gamma_th_dbm", c.gamma_th_dbm},
      {"solver", sol},
      {"trials", c.trials},
      {"master_seed", c.master_seed},
      {"sweep", sweep},
      {"methods", methods},
      {"theta_grid_deg", c.theta_grid_deg},
  };
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (in.bad()) throw IoError("cannot read config file " + path.string());
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw ConfigError({path.string() + ": malformed JSON: " + e.what()});
  }
  return config_from_json(j);
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  const std::string canon = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canon) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(config_hash(cfg)));
  return buf;
}

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial,
                          std::uint64_t sweep_index) {
  std::uint64_t z = splitmix64(master);
  z = splitmix64(z ^ (trial * 0xd1342543de82ef95ULL + 0x2545f4914f6cdd1dULL));
  z = splitmix64(z ^ (sweep_index * 0xaf251af3b0f025b5ULL + 0x632be59bd9b4e019ULL));
  return z;
}

}  // namespace isac::harness
