#pragma once

// Objective stack for sum-rate maximization under beampattern-gain floors:
// SINR and rate, beampattern gain, sensing constraints, the fractional
// programming (Lagrangian dual) transform, and the augmented Lagrangian
// cost minimized on the unit-trace sphere.
//
// User and target indices are zero-based.

#include "isac/common.h"
#include "isac/manifold.h"
#include "isac/scenario.h"

namespace isac::problem {

using manifold::LiftedPoint;

class ProblemSpec {
 public:
  explicit ProblemSpec(scenario::LiftedScenario lifted);

  const scenario::LiftedScenario& lifted() const { return lifted_; }
  const CMatrix& H_hat() const { return lifted_.H_hat; }
  const CMatrix& A_hat() const { return lifted_.A_hat; }
  double sigma2() const { return lifted_.sigma2; }
  double p_max() const { return lifted_.P; }
  const RVector& gamma_th() const { return lifted_.gamma_th; }

  Index M() const { return lifted_.H_hat.rows() - 1; }
  Index K() const { return lifted_.H_hat.cols(); }
  Index N() const { return lifted_.A_hat.cols(); }

 private:
  scenario::LiftedScenario lifted_;
};

/// Auxiliary SINR surrogates of the dual transform; gamma_hat = 1 + mu.
struct FpState {
  RVector mu;
  RVector gamma_hat;

  static FpState from_mu(RVector mu);
};

struct Multipliers {
  RVector lambda;
  double rho = 1.0;
  double lambda_min = 0.0;
  double lambda_max = 100.0;

  /// Throws DomainError unless rho > 0 and every lambda is inside its bounds.
  void validate() const;
};

/// Per-user link quantities at a lifted point: u_ki = h_k^H w_i.
struct LinkTerms {
  CMatrix U;            // K x K
  RVector signal;       // |u_kk|^2
  RVector interference; // sum_{i != k} |u_ki|^2
};

LinkTerms link_terms(const ProblemSpec& spec, const LiftedPoint& w);

double sinr(const ProblemSpec& spec, const LiftedPoint& w, Index k);
RVector sinr_all(const ProblemSpec& spec, const LiftedPoint& w);
double sum_rate(const ProblemSpec& spec, const LiftedPoint& w);

/// Sum rate of a physical beamformer on raw channels (bits/s/Hz).
double sum_rate_physical(const CMatrix& h, const CMatrix& w, double sigma2);
RVector sinr_physical(const CMatrix& h, const CMatrix& w, double sigma2);

/// a(theta)^H (sum_k w_k w_k^H) a(theta) for a physical M x K beamformer.
double beampattern_gain(const CMatrix& w, double theta);

/// Gamma_n - a_hat_n^H W W^H a_hat_n; <= 0 when the floor is met.
double constraint_g(const ProblemSpec& spec, const LiftedPoint& w, Index n);
RVector constraint_values(const ProblemSpec& spec, const LiftedPoint& w);

/// mu_k = sinr_k (the optimal dual-transform auxiliary for fixed W).
FpState update_mu(const ProblemSpec& spec, const LiftedPoint& w);

/// Maximization form sum_k gamma_hat_k |u_kk|^2 / (sum_i |u_ki|^2 + sigma^2).
double fp_objective(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp);

/// sum_k gamma_hat_k (I_k + sigma^2) / D_k, so that
/// -fp_objective = fp_shortfall - sum_k gamma_hat_k. Differences of this
/// quantity stay accurate when gamma_hat is large.
double fp_shortfall(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp);

/// Dual-transformed rate objective for arbitrary mu, in bits/s/Hz:
/// (1/ln 2) sum_k [ln(1+mu_k) - mu_k + (1+mu_k) sinr_k / (1 + sinr_k)].
double dual_rate_objective(const ProblemSpec& spec, const LiftedPoint& w, const RVector& mu);

/// f(W) + (rho/2) sum_n max{0, lambda_n/rho + g_n(W)}^2 with f = -fp_objective.
double aug_lagrangian(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp,
                      const Multipliers& mult);

/// Euclidean gradient 2 dL/dW* of aug_lagrangian, so that
/// dL = Re Tr(grad^H dW) + o(||dW||).
CMatrix euclidean_grad(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp,
                       const Multipliers& mult);

/// sqrt(p_max) * (first M rows of W).
CMatrix unlift(const LiftedPoint& w, double p_max, Index m);

/// The augmented Lagrangian bound to fixed (mu, lambda, rho), evaluated in a
/// shifted form for the solver.
///
/// The fractional terms gamma_hat_k S_k / D_k sit close to gamma_hat_k at high
/// SNR, so `value()` returns L + sum_k gamma_hat_k computed as
/// sum_k gamma_hat_k (I_k + sigma^2) / D_k + penalty, which keeps line-search
/// comparisons accurate when gamma_hat is large. Gradients are unaffected.
class AugmentedLagrangian {
 public:
  AugmentedLagrangian(const ProblemSpec& spec, FpState fp, Multipliers mult);

  double value(const LiftedPoint& w) const;
  CMatrix gradient(const LiftedPoint& w) const;

  /// L(W) = value(W) - offset().
  double offset() const { return offset_; }
  double exact(const LiftedPoint& w) const { return value(w) - offset_; }

  const FpState& fp() const { return fp_; }
  const Multipliers& multipliers() const { return mult_; }

 private:
  const ProblemSpec* spec_;
  FpState fp_;
  Multipliers mult_;
  double offset_;
};

}  // namespace isac::problem
