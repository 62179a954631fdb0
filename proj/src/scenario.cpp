#include "isac/scenario.h"

#include <cmath>
#include <numbers>

namespace isac::scenario {

void GeometryConfig::validate() const {
  std::vector<std::string> errs;
  if (!(user_region_radius > 0.0)) errs.push_back("geometry.user_region_radius: must be > 0");
  if (!(D0 > 0.0)) errs.push_back("geometry.D0: must be > 0");
  if (!(nu > 0.0)) errs.push_back("geometry.nu: must be > 0");
  if (!std::isfinite(C0_db)) errs.push_back("geometry.C0_db: must be finite");
  if (sensing_angles_deg.empty()) errs.push_back("geometry.sensing_angles_deg: must not be empty");
  for (double a : sensing_angles_deg) {
    if (!(a >= -90.0 && a <= 90.0)) {
      errs.push_back("geometry.sensing_angles_deg: " + std::to_string(a) +
                     " outside [-90, 90]");
    }
  }
  if (placement == UserPlacement::fixed && user_angles_deg.empty()) {
    errs.push_back("geometry.user_angles_deg: must not be empty for fixed placement");
  }
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

double pathloss(double d, const GeometryConfig& cfg) {
  if (!(d > 0.0)) throw DomainError("pathloss: distance must be positive");
  return db_to_linear(cfg.C0_db) * std::pow(d / cfg.D0, -cfg.nu);
}

CVector steering(double theta, Index m) {
  if (m < 1) throw DomainError("steering: need M >= 1");
  const double phase = std::numbers::pi * std::sin(theta);
  const double scale = 1.0 / std::sqrt(static_cast<double>(m));
  CVector a(m);
  for (Index i = 0; i < m; ++i) {
    a(i) = scale * std::polar(1.0, phase * static_cast<double>(i));
  }
  return a;
}

Scenario sample_channels(const GeometryConfig& cfg, Index m, Index k,
                         const LinkBudget& budget, std::mt19937_64& rng) {
  cfg.validate();
  std::vector<std::string> errs;
  if (m < 1) errs.push_back("M: must be >= 1");
  if (k < 1) errs.push_back("K: must be >= 1");
  if (cfg.placement == UserPlacement::fixed &&
      k > static_cast<Index>(cfg.user_angles_deg.size())) {
    errs.push_back("K: exceeds the number of configured user_angles_deg");
  }
  if (!(budget.sigma2 > 0.0)) errs.push_back("sigma2: must be > 0");
  if (!(budget.p_max > 0.0)) errs.push_back("p_max: must be > 0");
  if (!(budget.gamma_th > 0.0)) errs.push_back("gamma_th: must be > 0");
  if (!errs.empty()) throw ConfigError(std::move(errs));

  Scenario s;
  s.sigma2 = budget.sigma2;
  s.p_max = budget.p_max;

  const double cx = cfg.user_region_center[0] - cfg.bs_position[0];
  const double cy = cfg.user_region_center[1] - cfg.bs_position[1];
  const double center_range = std::hypot(cx, cy);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  s.user_distances.resize(static_cast<size_t>(k));
  for (Index u = 0; u < k; ++u) {
    double d = center_range;
    if (cfg.placement == UserPlacement::random_disk) {
      const double r = cfg.user_region_radius * std::sqrt(unif(rng));
      const double phi = 2.0 * std::numbers::pi * unif(rng);
      d = std::hypot(cx + r * std::cos(phi), cy + r * std::sin(phi));
      d = std::max(d, 1e-3);
    }
    s.user_distances[static_cast<size_t>(u)] = d;
  }

  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  s.H.resize(m, k);
  for (Index u = 0; u < k; ++u) {
    const double amp = std::sqrt(pathloss(s.user_distances[static_cast<size_t>(u)], cfg));
    for (Index i = 0; i < m; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      s.H(i, u) = amp * Complex(re, im);
    }
  }

  const Index n = static_cast<Index>(cfg.sensing_angles_deg.size());
  s.A.resize(m, n);
  s.gamma_th = RVector::Constant(n, budget.gamma_th);
  for (Index j = 0; j < n; ++j) {
    const double th = deg_to_rad(cfg.sensing_angles_deg[static_cast<size_t>(j)]);
    s.sensing_rad.push_back(th);
    s.A.col(j) = steering(th, m);
  }
  return s;
}

LiftedScenario lift(const Scenario& s) {
  const double root = std::sqrt(s.p_max);
  const Index m = s.H.rows();
  LiftedScenario out;
  out.P = s.p_max;
  out.sigma2 = s.sigma2;
  out.gamma_th = s.gamma_th;
  out.H_hat = CMatrix::Zero(m + 1, s.H.cols());
  out.H_hat.topRows(m) = root * s.H;
  out.A_hat = CMatrix::Zero(m + 1, s.A.cols());
  out.A_hat.topRows(m) = root * s.A;
  return out;
}

}  // namespace isac::scenario
