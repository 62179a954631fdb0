#include "isac/manifold.h"

#include <cmath>

namespace isac::manifold {
namespace {

void require_same_shape(const CMatrix& a, const CMatrix& b, const char* where) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError(std::string(where) + ": shape mismatch (" +
                         std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                         " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()) + ")");
  }
}

void require_same_base(const LiftedPoint& a, const LiftedPoint& b, const char* where) {
  if (!a.shares_storage(b) && a.matrix() != b.matrix()) {
    throw DomainError(std::string(where) + ": tangent vectors live at different points");
  }
}

}  // namespace

LiftedPoint LiftedPoint::normalize(CMatrix entries) {
  if (!entries.allFinite()) {
    throw DomainError("LiftedPoint::normalize: non-finite entries");
  }
  const double n = entries.norm();
  if (!(n > 1e-300)) {
    throw DomainError("LiftedPoint::normalize: zero matrix");
  }
  entries /= n;
  return LiftedPoint(std::make_shared<const CMatrix>(std::move(entries)));
}

LiftedPoint LiftedPoint::from_unit(CMatrix entries) {
  if (!entries.allFinite()) {
    throw DomainError("LiftedPoint::from_unit: non-finite entries");
  }
  const double dev = std::abs(entries.squaredNorm() - 1.0);
  if (dev > kUnitTraceTol) {
    throw DomainError("LiftedPoint::from_unit: |Tr(WW^H) - 1| = " +
                      std::to_string(dev));
  }
  return LiftedPoint(std::make_shared<const CMatrix>(std::move(entries)));
}

double LiftedPoint::unit_trace_deviation() const {
  return std::abs(entries_->squaredNorm() - 1.0);
}

TangentVector TangentVector::zero(const LiftedPoint& base) {
  return {base, CMatrix::Zero(base.rows(), base.cols())};
}

TangentVector TangentVector::checked(const LiftedPoint& base, CMatrix entries) {
  require_same_shape(base.matrix(), entries, "TangentVector::checked");
  const double r = std::abs(real_inner(base.matrix(), entries));
  if (r > kTangencyTol * std::max(1.0, entries.norm())) {
    throw DomainError("TangentVector::checked: not tangent (residual " +
                      std::to_string(r) + ")");
  }
  return {base, std::move(entries)};
}

double TangentVector::tangency_residual() const {
  return std::abs(real_inner(base_.matrix(), entries_));
}

TangentVector operator+(const TangentVector& a, const TangentVector& b) {
  require_same_shape(a.entries_, b.entries_, "TangentVector::operator+");
  require_same_base(a.base_, b.base_, "TangentVector::operator+");
  return {a.base_, a.entries_ + b.entries_};
}

TangentVector operator-(const TangentVector& a, const TangentVector& b) {
  require_same_shape(a.entries_, b.entries_, "TangentVector::operator-");
  require_same_base(a.base_, b.base_, "TangentVector::operator-");
  return {a.base_, a.entries_ - b.entries_};
}

double metric_inner(const TangentVector& xi, const TangentVector& zeta) {
  return real_inner(xi.matrix(), zeta.matrix());
}

double norm(const TangentVector& xi) { return xi.matrix().norm(); }

TangentVector project(const LiftedPoint& base, const CMatrix& g) {
  require_same_shape(base.matrix(), g, "project");
  const double c = real_inner(base.matrix(), g);
  CMatrix xi = g - c * base.matrix();
  // When g is nearly normal the subtraction cancels and leaves a normal
  // residue of order eps ||g||; a second pass reduces it to eps ||xi||.
  xi -= real_inner(base.matrix(), xi) * base.matrix();
  return {base, std::move(xi)};
}

LiftedPoint retract(const LiftedPoint& base, const TangentVector& xi, double alpha) {
  require_same_shape(base.matrix(), xi.matrix(), "retract");
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw DomainError("retract: step must be finite and non-negative");
  }
  if (alpha == 0.0) return base;
  CMatrix moved = base.matrix() + alpha * xi.matrix();
  const double n = moved.norm();
  // ||W + a xi||^2 = 1 + a^2 ||xi||^2 for tangent xi, so this only trips on
  // corrupted input.
  if (!(n >= 1e-300) || !std::isfinite(n)) {
    throw NumericError("retract: degenerate retraction (norm " + std::to_string(n) + ")");
  }
  moved /= n;
  return LiftedPoint::from_unit(std::move(moved));
}

TangentVector transport(const LiftedPoint& from, const LiftedPoint& to,
                        const TangentVector& xi) {
  require_same_shape(from.matrix(), xi.matrix(), "transport");
  return project(to, xi.matrix());
}

LiftedPoint random_point(Index m, Index k, std::mt19937_64& rng) {
  if (m < 1 || k < 1) throw DomainError("random_point: need M >= 1 and K >= 1");
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  CMatrix w(m + 1, k);
  for (Index j = 0; j < k; ++j) {
    for (Index i = 0; i <= m; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      w(i, j) = Complex(re, im);
    }
  }
  return LiftedPoint::normalize(std::move(w));
}

double distance(const LiftedPoint& a, const LiftedPoint& b) {
  require_same_shape(a.matrix(), b.matrix(), "distance");
  return (a.matrix() - b.matrix()).norm();
}

}  // namespace isac::manifold
