#pragma once

// Physical setting: geometry, large-scale pathloss, Rayleigh channels, ULA
// steering vectors, and the power-lifted quantities the optimizer consumes.

#include "isac/common.h"

#include <array>
#include <random>

namespace isac::scenario {

enum class UserPlacement {
  fixed,        // users at `user_angles_deg`, at the distance of the region center
  random_disk,  // uniform inside the user disk
};

struct GeometryConfig {
  std::array<double, 2> bs_position{0.0, 0.0};
  std::array<double, 2> user_region_center{50.0, 30.0};
  double user_region_radius = 20.0;
  std::vector<double> user_angles_deg{-30.0, 30.0};  // degrees
  std::vector<double> sensing_angles_deg{-54.0, -18.0, 18.0, 54.0};
  double C0_db = -30.0;
  double D0 = 1.0;  // meters
  double nu = 2.0;
  UserPlacement placement = UserPlacement::fixed;

  /// Collects every violated invariant; throws ConfigError if any.
  void validate() const;
};

/// Link-budget scalars, all in linear watts.
struct LinkBudget {
  double sigma2 = 0.0;
  double p_max = 0.0;
  double gamma_th = 0.0;
};

struct Scenario {
  CMatrix H;  // M x K, column k is h_k
  CMatrix A;  // M x N, column n is a(theta_n)
  double sigma2 = 0.0;
  double p_max = 0.0;
  RVector gamma_th;                 // N floors, watts
  std::vector<double> sensing_rad;  // theta_n
  std::vector<double> user_distances;
};

struct LiftedScenario {
  CMatrix H_hat;  // (M+1) x K, sqrt(P) [h_k; 0]
  CMatrix A_hat;  // (M+1) x N, sqrt(P) [a_n; 0]
  double P = 0.0;
  double sigma2 = 0.0;
  RVector gamma_th;
};

double db_to_linear(double db);
double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double deg_to_rad(double deg);

/// C0 (d / D0)^-nu with C0 converted from dB. Throws DomainError for d <= 0.
double pathloss(double d, const GeometryConfig& cfg);

/// Half-wavelength ULA response (1/sqrt(M)) [1, e^{j pi sin t}, ...]^T.
CVector steering(double theta, Index m);

/// Draws user positions and Rayleigh channels. Deterministic in `rng` state.
Scenario sample_channels(const GeometryConfig& cfg, Index m, Index k,
                         const LinkBudget& budget, std::mt19937_64& rng);

/// Power lifting with P = p_max.
LiftedScenario lift(const Scenario& s);

}  // namespace isac::scenario
