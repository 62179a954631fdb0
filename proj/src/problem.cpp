#include "isac/problem.h"

#include <cmath>
#include <numbers>

namespace isac::problem {
namespace {

void require_point_shape(const ProblemSpec& spec, const LiftedPoint& w) {
  if (w.rows() != spec.M() + 1 || w.cols() != spec.K()) {
    throw DimensionError("lifted point has shape " + std::to_string(w.rows()) + "x" +
                         std::to_string(w.cols()) + ", expected " +
                         std::to_string(spec.M() + 1) + "x" + std::to_string(spec.K()));
  }
}

void require_fp_shape(const ProblemSpec& spec, const FpState& fp) {
  if (fp.gamma_hat.size() != spec.K() || fp.mu.size() != spec.K()) {
    throw DimensionError("FpState length does not match K");
  }
}

// Penalty slack s_n = max{0, lambda_n / rho + g_n}.
RVector penalty_slack(const RVector& g, const Multipliers& mult) {
  RVector s(g.size());
  for (Index n = 0; n < g.size(); ++n) {
    s(n) = std::max(0.0, mult.lambda(n) / mult.rho + g(n));
  }
  return s;
}

// sum_k gamma_hat_k (I_k + sigma^2) / D_k
double shifted_fractional(const LinkTerms& t, const RVector& gamma_hat, double sigma2) {
  double acc = 0.0;
  for (Index k = 0; k < t.signal.size(); ++k) {
    const double rest = t.interference(k) + sigma2;
    acc += gamma_hat(k) * rest / (t.signal(k) + rest);
  }
  return acc;
}

}  // namespace

ProblemSpec::ProblemSpec(scenario::LiftedScenario lifted) : lifted_(std::move(lifted)) {
  if (lifted_.H_hat.rows() < 2 || lifted_.H_hat.cols() < 1) {
    throw DimensionError("ProblemSpec: H_hat must be (M+1) x K with M, K >= 1");
  }
  if (lifted_.A_hat.rows() != lifted_.H_hat.rows()) {
    throw DimensionError("ProblemSpec: A_hat and H_hat row counts differ");
  }
  if (lifted_.gamma_th.size() != lifted_.A_hat.cols()) {
    throw DimensionError("ProblemSpec: gamma_th length does not match N");
  }
  if (!(lifted_.sigma2 > 0.0)) throw DomainError("ProblemSpec: sigma2 must be > 0");
}

FpState FpState::from_mu(RVector mu) {
  FpState fp;
  fp.gamma_hat = mu.array() + 1.0;
  fp.mu = std::move(mu);
  return fp;
}

void Multipliers::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw DomainError("Multipliers: rho must be > 0");
  if (!(lambda_min <= lambda_max)) throw DomainError("Multipliers: lambda_min > lambda_max");
  for (Index n = 0; n < lambda.size(); ++n) {
    if (!(lambda(n) >= lambda_min && lambda(n) <= lambda_max)) {
      throw DomainError("Multipliers: lambda out of bounds");
    }
  }
}

LinkTerms link_terms(const ProblemSpec& spec, const LiftedPoint& w) {
  require_point_shape(spec, w);
  LinkTerms t;
  t.U = spec.H_hat().adjoint() * w.matrix();
  const Index k_count = spec.K();
  t.signal.resize(k_count);
  t.interference.resize(k_count);
  for (Index k = 0; k < k_count; ++k) {
    double interf = 0.0;
    for (Index i = 0; i < k_count; ++i) {
      if (i != k) interf += std::norm(t.U(k, i));
    }
    t.signal(k) = std::norm(t.U(k, k));
    t.interference(k) = interf;
  }
  return t;
}

double sinr(const ProblemSpec& spec, const LiftedPoint& w, Index k) {
  if (k < 0 || k >= spec.K()) throw IndexError("sinr: user index out of range");
  const LinkTerms t = link_terms(spec, w);
  return t.signal(k) / (t.interference(k) + spec.sigma2());
}

RVector sinr_all(const ProblemSpec& spec, const LiftedPoint& w) {
  const LinkTerms t = link_terms(spec, w);
  return t.signal.array() / (t.interference.array() + spec.sigma2());
}

double sum_rate(const ProblemSpec& spec, const LiftedPoint& w) {
  const RVector g = sinr_all(spec, w);
  double r = 0.0;
  for (Index k = 0; k < g.size(); ++k) r += std::log2(1.0 + g(k));
  return r;
}

RVector sinr_physical(const CMatrix& h, const CMatrix& w, double sigma2) {
  if (h.rows() != w.rows() || h.cols() != w.cols()) {
    throw DimensionError("sinr_physical: H and W shapes differ");
  }
  const CMatrix u = h.adjoint() * w;
  RVector out(h.cols());
  for (Index k = 0; k < h.cols(); ++k) {
    double interf = 0.0;
    for (Index i = 0; i < h.cols(); ++i) {
      if (i != k) interf += std::norm(u(k, i));
    }
    out(k) = std::norm(u(k, k)) / (interf + sigma2);
  }
  return out;
}

double sum_rate_physical(const CMatrix& h, const CMatrix& w, double sigma2) {
  const RVector g = sinr_physical(h, w, sigma2);
  double r = 0.0;
  for (Index k = 0; k < g.size(); ++k) r += std::log2(1.0 + g(k));
  return r;
}

double beampattern_gain(const CMatrix& w, double theta) {
  const CVector a = scenario::steering(theta, w.rows());
  return (a.adjoint() * w).squaredNorm();
}

RVector constraint_values(const ProblemSpec& spec, const LiftedPoint& w) {
  require_point_shape(spec, w);
  const CMatrix b = spec.A_hat().adjoint() * w.matrix();  // N x K
  RVector g(spec.N());
  for (Index n = 0; n < spec.N(); ++n) {
    g(n) = spec.gamma_th()(n) - b.row(n).squaredNorm();
  }
  return g;
}

double constraint_g(const ProblemSpec& spec, const LiftedPoint& w, Index n) {
  if (n < 0 || n >= spec.N()) throw IndexError("constraint_g: target index out of range");
  require_point_shape(spec, w);
  const CVector b = spec.A_hat().col(n).adjoint() * w.matrix();
  return spec.gamma_th()(n) - b.squaredNorm();
}

FpState update_mu(const ProblemSpec& spec, const LiftedPoint& w) {
  return FpState::from_mu(sinr_all(spec, w));
}

double fp_objective(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp) {
  require_fp_shape(spec, fp);
  const LinkTerms t = link_terms(spec, w);
  double acc = 0.0;
  for (Index k = 0; k < spec.K(); ++k) {
    acc += fp.gamma_hat(k) * t.signal(k) /
           (t.signal(k) + t.interference(k) + spec.sigma2());
  }
  return acc;
}

double fp_shortfall(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp) {
  require_fp_shape(spec, fp);
  return shifted_fractional(link_terms(spec, w), fp.gamma_hat, spec.sigma2());
}

double dual_rate_objective(const ProblemSpec& spec, const LiftedPoint& w, const RVector& mu) {
  if (mu.size() != spec.K()) throw DimensionError("dual_rate_objective: mu length != K");
  const RVector g = sinr_all(spec, w);
  double acc = 0.0;
  for (Index k = 0; k < spec.K(); ++k) {
    acc += std::log1p(mu(k)) - mu(k) + (1.0 + mu(k)) * g(k) / (1.0 + g(k));
  }
  return acc / std::numbers::ln2;
}

double aug_lagrangian(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp,
                      const Multipliers& mult) {
  return AugmentedLagrangian(spec, fp, mult).exact(w);
}

CMatrix euclidean_grad(const ProblemSpec& spec, const LiftedPoint& w, const FpState& fp,
                       const Multipliers& mult) {
  return AugmentedLagrangian(spec, fp, mult).gradient(w);
}

CMatrix unlift(const LiftedPoint& w, double p_max, Index m) {
  if (m < 1 || m > w.rows()) throw DimensionError("unlift: M out of range");
  return std::sqrt(p_max) * w.matrix().topRows(m);
}

AugmentedLagrangian::AugmentedLagrangian(const ProblemSpec& spec, FpState fp,
                                         Multipliers mult)
    : spec_(&spec), fp_(std::move(fp)), mult_(std::move(mult)) {
  require_fp_shape(spec, fp_);
  if (mult_.lambda.size() != spec.N()) {
    throw DimensionError("Multipliers: lambda length does not match N");
  }
  mult_.validate();
  offset_ = fp_.gamma_hat.sum();
}

double AugmentedLagrangian::value(const LiftedPoint& w) const {
  const LinkTerms t = link_terms(*spec_, w);
  const RVector s = penalty_slack(constraint_values(*spec_, w), mult_);
  return shifted_fractional(t, fp_.gamma_hat, spec_->sigma2()) +
         0.5 * mult_.rho * s.squaredNorm();
}

CMatrix AugmentedLagrangian::gradient(const LiftedPoint& w) const {
  const LinkTerms t = link_terms(*spec_, w);
  const Index k_count = spec_->K();
  const double sigma2 = spec_->sigma2();

  // grad of -sum_k gamma_k S_k / D_k is H_hat * C with
  //   C_kj = -2 gamma_k [delta_jk u_kk / D_k - S_k u_kj / D_k^2]
  // and the diagonal simplified to -2 gamma_k u_kk (I_k + sigma^2) / D_k^2.
  CMatrix c(k_count, k_count);
  for (Index k = 0; k < k_count; ++k) {
    const double rest = t.interference(k) + sigma2;
    const double d = t.signal(k) + rest;
    const double coeff = 2.0 * fp_.gamma_hat(k) / (d * d);
    for (Index j = 0; j < k_count; ++j) {
      c(k, j) = (j == k) ? -coeff * rest * t.U(k, k) : coeff * t.signal(k) * t.U(k, j);
    }
  }
  CMatrix grad = spec_->H_hat() * c;

  // Penalty: -2 rho sum_n s_n a_n a_n^H W.
  const CMatrix b = spec_->A_hat().adjoint() * w.matrix();  // N x K
  RVector g(spec_->N());
  for (Index n = 0; n < spec_->N(); ++n) {
    g(n) = spec_->gamma_th()(n) - b.row(n).squaredNorm();
  }
  const RVector s = penalty_slack(g, mult_);
  if ((s.array() > 0.0).any()) {
    const CMatrix weighted = s.cast<Complex>().asDiagonal() * b;
    grad.noalias() -= (2.0 * mult_.rho) * (spec_->A_hat() * weighted);
  }
  return grad;
}

}  // namespace isac::problem
