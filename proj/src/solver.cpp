#include "isac/solver.h"

#include "isac/baselines.h"

#include <chrono>
#include <cmath>

namespace isac::solver {

using manifold::metric_inner;
using manifold::project;
using manifold::retract;
using manifold::transport;

void RcgConfig::validate() const {
  std::vector<std::string> errs;
  if (!(delta1 > 0.0)) errs.push_back("solver.delta1: must be > 0");
  if (max_iters < 0) errs.push_back("solver.max_iters: must be >= 0");
  if (!(armijo_c1 > 0.0 && armijo_c1 < 1.0)) errs.push_back("solver.armijo_c1: must be in (0, 1)");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0)) {
    errs.push_back("solver.armijo_shrink: must be in (0, 1)");
  }
  if (!std::isfinite(alpha_init)) errs.push_back("solver.alpha_init: must be finite");
  if (max_backtracks < 0) errs.push_back("solver.max_backtracks: must be >= 0");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

void AlmoConfig::validate() const {
  std::vector<std::string> errs;
  if (!(eps0 > 0.0)) errs.push_back("solver.eps0: must be > 0");
  if (!(eps_min >= 0.0 && eps_min <= eps0)) errs.push_back("solver.eps_min: must be in [0, eps0]");
  if (!(theta_eps > 0.0 && theta_eps < 1.0)) errs.push_back("solver.theta_eps: must be in (0, 1)");
  if (!(theta_rho > 1.0)) errs.push_back("solver.theta_rho: must be > 1");
  if (!(rho0 > 0.0)) errs.push_back("solver.rho0: must be > 0");
  if (!(tau > 0.0 && tau < 1.0)) errs.push_back("solver.tau: must be in (0, 1)");
  if (!(d_min >= 0.0)) errs.push_back("solver.d_min: must be >= 0");
  if (!(lambda_min <= lambda_max)) errs.push_back("solver.lambda_min: must be <= lambda_max");
  if (!(lambda0 >= lambda_min && lambda0 <= lambda_max)) {
    errs.push_back("solver.lambda0: must lie in [lambda_min, lambda_max]");
  }
  if (max_outer < 1) errs.push_back("solver.max_outer: must be >= 1");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

void ImboConfig::validate() const {
  std::vector<std::string> errs;
  for (auto* check : {+[](const ImboConfig& c) { c.rcg.validate(); },
                      +[](const ImboConfig& c) { c.almo.validate(); }}) {
    try {
      check(*this);
    } catch (const ConfigError& e) {
      errs.insert(errs.end(), e.problems().begin(), e.problems().end());
    }
  }
  if (!(delta2 > 0.0)) errs.push_back("solver.delta2: must be > 0");
  if (max_fp_iters < 1) errs.push_back("solver.max_fp_iters: must be >= 1");
  if (!(feasibility_rtol >= 0.0)) errs.push_back("solver.feasibility_rtol: must be >= 0");
  if (!errs.empty()) throw ConfigError(std::move(errs));
}

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::gradient_tol: return "gradient_tol";
    case StopReason::distance_tol: return "distance_tol";
    case StopReason::max_iters: return "max_iters";
  }
  return "unknown";
}

std::string to_string(RcgStop r) {
  switch (r) {
    case RcgStop::gradient_tol: return "gradient_tol";
    case RcgStop::max_iters: return "max_iters";
    case RcgStop::stalled: return "stalled";
  }
  return "unknown";
}

CostFunction make_cost(const problem::AugmentedLagrangian& lagrangian) {
  return {[&lagrangian](const LiftedPoint& w) { return lagrangian.value(w); },
          [&lagrangian](const LiftedPoint& w) { return lagrangian.gradient(w); }};
}

ArmijoResult armijo_step(const CostFunction& cost, const LiftedPoint& base,
                         const TangentVector& eta, const TangentVector& grad,
                         double alpha0, const RcgConfig& cfg,
                         std::optional<double> base_cost) {
  const double f0 = base_cost ? *base_cost : cost.value(base);
  if (!std::isfinite(f0)) throw NumericError("armijo_step: non-finite cost at base point");
  const double slope = metric_inner(grad, eta);
  if (!(slope < 0.0)) throw DomainError("armijo_step: eta is not a descent direction");
  if (!(alpha0 > 0.0) || !std::isfinite(alpha0)) {
    throw DomainError("armijo_step: initial step must be positive and finite");
  }

  double alpha = alpha0;
  for (int j = 0;; ++j) {
    LiftedPoint trial = retract(base, eta, alpha);
    const double f = cost.value(trial);
    if (std::isfinite(f) && f <= f0 + cfg.armijo_c1 * alpha * slope) {
      return {.alpha = alpha, .next = std::move(trial), .next_cost = f,
              .backtracks = j, .fallback = false};
    }
    if (j >= cfg.max_backtracks) {
      return {.alpha = alpha, .next = std::move(trial), .next_cost = f,
              .backtracks = j, .fallback = true};
    }
    alpha *= cfg.armijo_shrink;
  }
}

RcgResult rcg_minimize(const CostFunction& cost, const LiftedPoint& start,
                       const RcgConfig& cfg) {
  LiftedPoint x = start;
  double f = cost.value(x);
  CMatrix eg = cost.euclidean_gradient(x);
  if (!std::isfinite(f) || !eg.allFinite()) {
    throw NumericError("rcg_minimize: non-finite cost or gradient at start", 0);
  }
  TangentVector g = project(x, eg);
  double gnorm = manifold::norm(g);

  RcgResult out{.point = x, .cost = f, .grad_norm = gnorm, .initial_grad_norm = gnorm,
                .iterations = 0, .stop = RcgStop::gradient_tol, .trace = {}};
  if (gnorm <= cfg.delta1) return out;

  out.stop = RcgStop::max_iters;
  TangentVector eta = -g;
  bool steepest = true;
  double alpha0 = cfg.alpha_init > 0.0 ? cfg.alpha_init : 1.0 / gnorm;

  int iter = 0;
  while (iter < cfg.max_iters) {
    bool restarted = false;
    if (!(metric_inner(g, eta) < 0.0)) {
      eta = -g;
      steepest = true;
      restarted = true;
    }
    ArmijoResult step = armijo_step(cost, x, eta, g, alpha0, cfg, f);
    if (step.fallback) {
      if (steepest) {
        out.stop = RcgStop::stalled;
        break;
      }
      // Conjugate direction failed; retry from steepest descent.
      eta = -g;
      steepest = true;
      continue;
    }
    ++iter;

    LiftedPoint x_new = step.next;
    const double f_new = step.next_cost;
    CMatrix eg_new = cost.euclidean_gradient(x_new);
    if (!std::isfinite(f_new) || !eg_new.allFinite()) {
      throw NumericError("rcg_minimize: non-finite cost or gradient", iter);
    }
    TangentVector g_new = project(x_new, eg_new);
    const double gnorm_new = manifold::norm(g_new);

    // Hestenes-Stiefel with a nonnegativity clamp; restart on a degenerate
    // denominator.
    const TangentVector eta_t = transport(x, x_new, eta);
    const TangentVector g_t = transport(x, x_new, g);
    const TangentVector y = g_new - g_t;
    const double denom = metric_inner(eta_t, y);
    double beta = 0.0;
    if (std::abs(denom) >= 1e-14 * gnorm_new * gnorm_new && denom != 0.0) {
      beta = std::max(0.0, metric_inner(g_new, y) / denom);
    }
    if (beta > 0.0) {
      eta = -g_new + beta * eta_t;
      steepest = false;
    } else {
      eta = -g_new;
      steepest = true;
      restarted = true;
    }

    const double eta_norm = manifold::norm(eta);
    out.trace.push_back(RcgRecord{
        .iter = iter,
        .cost = f_new,
        .grad_norm = gnorm_new,
        .step = step.alpha,
        .backtracks = step.backtracks,
        .fallback = false,
        .beta = beta,
        .restarted = restarted,
        .unit_trace_dev = x_new.unit_trace_deviation(),
        .grad_tangency = gnorm_new > 0.0 ? g_new.tangency_residual() / gnorm_new : 0.0,
        .dir_tangency = eta_norm > 0.0 ? eta.tangency_residual() / eta_norm : 0.0,
    });

    alpha0 = 2.0 * step.alpha;
    x = std::move(x_new);
    f = f_new;
    g = std::move(g_new);
    gnorm = gnorm_new;

    // Armijo only accepts decrease, so the latest iterate is the best one.
    out.point = x;
    out.cost = f;
    out.grad_norm = gnorm;
    out.iterations = iter;
    if (gnorm <= cfg.delta1) {
      out.stop = RcgStop::gradient_tol;
      return out;
    }
  }
  return out;
}

AlmoResult almo_solve(const problem::ProblemSpec& spec, const problem::FpState& fp,
                      const LiftedPoint& start, const problem::Multipliers& mult0,
                      const AlmoConfig& cfg, const RcgConfig& rcg) {
  cfg.validate();
  rcg.validate();
  mult0.validate();
  if (mult0.lambda.size() != spec.N()) {
    throw DimensionError("almo_solve: lambda length does not match N");
  }

  AlmoResult out{.point = start, .multipliers = mult0, .rounds = {}, .rcg_trace = {},
                 .stop = StopReason::max_iters, .final_eps = cfg.eps0};
  LiftedPoint w = start;
  problem::Multipliers mult = mult0;
  double eps = cfg.eps0;
  double prev_sigma = 0.0;

  for (int t = 0; t < cfg.max_outer; ++t) {
    const problem::AugmentedLagrangian lagrangian(spec, fp, mult);
    RcgConfig inner = rcg;
    inner.delta1 = std::max(eps, rcg.delta1);

    const double l_before = lagrangian.exact(w);
    RcgResult sub = [&] {
      try {
        return rcg_minimize(make_cost(lagrangian), w, inner);
      } catch (const NumericError& e) {
        throw NumericError("almo_solve round " + std::to_string(t) + ": " + e.what(),
                           e.iterate());
      }
    }();
    const double l_after = sub.cost - lagrangian.offset();

    const RVector g = problem::constraint_values(spec, sub.point);
    const double rho = mult.rho;
    double sigma = 0.0;
    for (Index n = 0; n < spec.N(); ++n) {
      const double updated = std::clamp(mult.lambda(n) + rho * g(n), mult.lambda_min,
                                        mult.lambda_max);
      mult.lambda(n) = updated;
      sigma = std::max(sigma, std::abs(std::max(g(n), -updated / rho)));
    }
    const double used_eps = eps;
    eps = std::max(cfg.eps_min, cfg.theta_eps * eps);
    if (!(t == 0 || sigma <= cfg.tau * prev_sigma)) mult.rho = cfg.theta_rho * rho;
    prev_sigma = sigma;

    const double moved = manifold::distance(w, sub.point);
    for (const auto& rec : sub.trace) out.rcg_trace.push_back({0, t, rec});
    out.rounds.push_back(AlmoRound{
        .fp_round = 0,
        .round = t,
        .objective = -problem::fp_objective(spec, sub.point, fp),
        .sum_rate = problem::sum_rate(spec, sub.point),
        .max_violation = g.size() ? g.maxCoeff() : 0.0,
        .rho = rho,
        .lambda = mult.lambda,
        .eps = used_eps,
        .distance = moved,
        .lagrangian_before = l_before,
        .lagrangian_after = l_after,
        .grad_norm = sub.grad_norm,
        .initial_grad_norm = sub.initial_grad_norm,
        .rcg_iterations = sub.iterations,
        .rcg_stop = sub.stop,
    });
    w = sub.point;

    if (moved < cfg.d_min && used_eps <= cfg.eps_min) {
      out.stop = StopReason::distance_tol;
      break;
    }
  }
  out.point = w;
  out.multipliers = mult;
  out.final_eps = eps;
  return out;
}

LiftedPoint mmse_start(const problem::ProblemSpec& spec) {
  const Index m = spec.M();
  const CMatrix h = spec.H_hat().topRows(m) / std::sqrt(spec.p_max());
  const CMatrix w = baselines::mmse_beamformer(h, spec.sigma2(), spec.p_max()).W;
  CMatrix lifted = CMatrix::Zero(m + 1, spec.K());
  lifted.topRows(m) = w;
  return LiftedPoint::normalize(std::move(lifted));
}

ImboResult imbo(const problem::ProblemSpec& spec, const ImboConfig& cfg,
                std::mt19937_64& rng) {
  cfg.validate();
  const auto t0 = std::chrono::steady_clock::now();

  LiftedPoint w = cfg.init == InitMode::mmse ? mmse_start(spec)
                                             : manifold::random_point(spec.M(), spec.K(), rng);
  problem::Multipliers mult{.lambda = RVector::Constant(spec.N(), cfg.almo.lambda0),
                            .rho = cfg.almo.rho0,
                            .lambda_min = cfg.almo.lambda_min,
                            .lambda_max = cfg.almo.lambda_max};

  SolveReport report;
  for (int r = 0; r < cfg.max_fp_iters; ++r) {
    const problem::FpState fp = problem::update_mu(spec, w);
    AlmoResult almo = almo_solve(spec, fp, w, mult, cfg.almo, cfg.rcg);

    const double change = std::abs(problem::fp_shortfall(spec, almo.point, fp) -
                                   problem::fp_shortfall(spec, w, fp));
    int rcg_iters = 0;
    for (auto& round : almo.rounds) {
      round.fp_round = r;
      rcg_iters += round.rcg_iterations;
      report.almo_trace.push_back(round);
    }
    for (auto& entry : almo.rcg_trace) {
      entry.fp_round = r;
      report.rcg_trace.push_back(entry);
    }
    const RVector g = problem::constraint_values(spec, almo.point);
    report.outer_trace.push_back(FpRound{
        .round = r,
        .objective = -problem::fp_objective(spec, almo.point, fp),
        .objective_change = change,
        .sum_rate = problem::sum_rate(spec, almo.point),
        .max_violation = g.size() ? g.maxCoeff() : 0.0,
        .rho = almo.multipliers.rho,
        .lambda = almo.multipliers.lambda,
        .eps = almo.final_eps,
        .distance = manifold::distance(w, almo.point),
        .almo_rounds = static_cast<int>(almo.rounds.size()),
        .rcg_iterations = rcg_iters,
    });
    report.almo_iterations += static_cast<int>(almo.rounds.size());
    report.rcg_iterations += rcg_iters;
    report.fp_iterations = r + 1;

    w = almo.point;
    mult = almo.multipliers;
    if (change < cfg.delta2) {
      report.converged = true;
      report.reason = StopReason::distance_tol;
      break;
    }
  }

  const RVector g = problem::constraint_values(spec, w);
  report.max_violation = g.size() ? g.maxCoeff() : 0.0;
  report.feasible = true;
  for (Index n = 0; n < g.size(); ++n) {
    if (g(n) > cfg.feasibility_rtol * spec.gamma_th()(n)) report.feasible = false;
  }
  report.final_sum_rate = problem::sum_rate(spec, w);
  report.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  return ImboResult{.W = problem::unlift(w, spec.p_max(), spec.M()),
                    .lifted = w,
                    .multipliers = mult,
                    .report = std::move(report)};
}

}  // namespace isac::solver
