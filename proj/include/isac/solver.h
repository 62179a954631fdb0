#pragma once

// Nested solvers on the unit-trace sphere:
//   rcg_minimize  Riemannian conjugate gradient (Hestenes-Stiefel, Armijo)
//   almo_solve    augmented Lagrangian outer loop over the sensing floors
//   imbo          alternation between the dual-transform mu update and ALMO

#include "isac/manifold.h"
#include "isac/problem.h"

#include <functional>
#include <optional>
#include <random>
#include <string>

namespace isac::solver {

using manifold::LiftedPoint;
using manifold::TangentVector;

struct RcgConfig {
  double delta1 = 1e-6;       // Riemannian gradient-norm tolerance
  int max_iters = 500;
  double armijo_c1 = 1e-4;
  double armijo_shrink = 0.5;
  double alpha_init = 0.0;    // <= 0: 1 / ||grad_0|| on the first iteration
  int max_backtracks = 50;

  void validate() const;
};

struct AlmoConfig {
  double eps0 = 1e-3;
  double eps_min = 1e-6;
  double theta_eps = 0.5;
  double theta_rho = 4.0;
  double rho0 = 1.0;
  double tau = 0.5;
  double d_min = 1e-10;
  double lambda_min = 0.0;
  double lambda_max = 100.0;
  double lambda0 = 1e-2;
  int max_outer = 100;

  void validate() const;
};

enum class InitMode { random, mmse };

struct ImboConfig {
  RcgConfig rcg;
  AlmoConfig almo;
  double delta2 = 1e-6;
  int max_fp_iters = 50;
  InitMode init = InitMode::mmse;
  /// A solution counts as sensing-feasible when max_n g_n <= rtol * Gamma_n.
  double feasibility_rtol = 1e-4;

  void validate() const;
};

enum class StopReason { gradient_tol, distance_tol, max_iters };
enum class RcgStop { gradient_tol, max_iters, stalled };

std::string to_string(StopReason r);
std::string to_string(RcgStop r);

/// A smooth cost on the sphere: value and Euclidean gradient 2 df/dW*.
struct CostFunction {
  std::function<double(const LiftedPoint&)> value;
  std::function<CMatrix(const LiftedPoint&)> euclidean_gradient;
};

CostFunction make_cost(const problem::AugmentedLagrangian& lagrangian);

struct ArmijoResult {
  double alpha = 0.0;
  LiftedPoint next;
  double next_cost = 0.0;
  int backtracks = 0;
  bool fallback = false;  // no trial met the decrease condition
};

/// Backtracking along alpha0 * shrink^j, j = 0..cfg.max_backtracks, accepting
/// the first step with cost(R(alpha eta)) <= cost(base) + c1 alpha <grad, eta>.
/// Requires <grad, eta> < 0. If every trial fails, the smallest trial is
/// returned with `fallback` set.
ArmijoResult armijo_step(const CostFunction& cost, const LiftedPoint& base,
                         const TangentVector& eta, const TangentVector& grad,
                         double alpha0, const RcgConfig& cfg,
                         std::optional<double> base_cost = std::nullopt);

struct RcgRecord {
  int iter = 0;            // 1-based iteration producing this iterate
  double cost = 0.0;
  double grad_norm = 0.0;  // at the new iterate
  double step = 0.0;
  int backtracks = 0;
  bool fallback = false;
  double beta = 0.0;
  bool restarted = false;  // direction reset to steepest descent
  double unit_trace_dev = 0.0;
  double grad_tangency = 0.0;  // |Re Tr(W^H g)| / ||g||
  double dir_tangency = 0.0;   // |Re Tr(W^H eta)| / ||eta|| for the next direction
};

struct RcgResult {
  LiftedPoint point;
  double cost = 0.0;
  double grad_norm = 0.0;
  double initial_grad_norm = 0.0;
  int iterations = 0;
  RcgStop stop = RcgStop::max_iters;
  std::vector<RcgRecord> trace;
};

RcgResult rcg_minimize(const CostFunction& cost, const LiftedPoint& start,
                       const RcgConfig& cfg);

struct AlmoRound {
  int fp_round = 0;
  int round = 0;
  double objective = 0.0;      // f = -fp_objective at the new iterate
  double sum_rate = 0.0;
  double max_violation = 0.0;  // max_n g_n
  double rho = 0.0;            // penalty used for this round
  RVector lambda;              // after the multiplier update
  double eps = 0.0;            // accuracy used for this round
  double distance = 0.0;       // chordal distance moved
  double lagrangian_before = 0.0;
  double lagrangian_after = 0.0;
  double grad_norm = 0.0;      // ||grad L|| at the new iterate, pre-update lambda
  double initial_grad_norm = 0.0;
  int rcg_iterations = 0;
  RcgStop rcg_stop = RcgStop::gradient_tol;
};

struct RcgTraceEntry {
  int fp_round = 0;
  int almo_round = 0;
  RcgRecord record;
};

struct AlmoResult {
  LiftedPoint point;
  problem::Multipliers multipliers;
  std::vector<AlmoRound> rounds;
  std::vector<RcgTraceEntry> rcg_trace;
  StopReason stop = StopReason::max_iters;
  double final_eps = 0.0;
};

AlmoResult almo_solve(const problem::ProblemSpec& spec, const problem::FpState& fp,
                      const LiftedPoint& start, const problem::Multipliers& mult0,
                      const AlmoConfig& cfg, const RcgConfig& rcg);

struct FpRound {
  int round = 0;
  double objective = 0.0;         // f at the new iterate, this round's mu
  double objective_change = 0.0;  // |f(W_t) - f(W_{t+1})|
  double sum_rate = 0.0;
  double max_violation = 0.0;
  double rho = 0.0;
  RVector lambda;
  double eps = 0.0;
  double distance = 0.0;
  int almo_rounds = 0;
  int rcg_iterations = 0;
};

struct SolveReport {
  std::vector<FpRound> outer_trace;
  std::vector<AlmoRound> almo_trace;
  std::vector<RcgTraceEntry> rcg_trace;
  double wall_time = 0.0;
  bool converged = false;
  StopReason reason = StopReason::max_iters;
  bool feasible = false;
  double max_violation = 0.0;
  double final_sum_rate = 0.0;
  int fp_iterations = 0;
  int almo_iterations = 0;
  int rcg_iterations = 0;
};

struct ImboResult {
  CMatrix W;  // physical M x K beamformer
  LiftedPoint lifted;
  problem::Multipliers multipliers;
  SolveReport report;
};

/// Lifted starting point built from the MMSE precoder (auxiliary row zero).
LiftedPoint mmse_start(const problem::ProblemSpec& spec);

ImboResult imbo(const problem::ProblemSpec& spec, const ImboConfig& cfg,
                std::mt19937_64& rng);

}  // namespace isac::solver
