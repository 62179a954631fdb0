#pragma once

// Geometry of the complex unit-trace sphere
//   M = { W in C^{(M+1) x K} : Tr(W W^H) = 1 }
// with the embedded metric <X, Y> = Re Tr(X^H Y).

#include "isac/common.h"

#include <memory>
#include <random>

namespace isac::manifold {

inline constexpr double kUnitTraceTol = 1e-12;
inline constexpr double kTangencyTol = 1e-10;

/// A point on the unit-trace sphere. Immutable; copies share storage.
class LiftedPoint {
 public:
  /// Scales `entries` to unit Frobenius norm. Throws DomainError for a zero or
  /// non-finite matrix.
  static LiftedPoint normalize(CMatrix entries);

  /// Wraps a matrix that must already satisfy |Tr(W W^H) - 1| <= kUnitTraceTol.
  static LiftedPoint from_unit(CMatrix entries);

  const CMatrix& matrix() const { return *entries_; }
  Index rows() const { return entries_->rows(); }
  Index cols() const { return entries_->cols(); }

  /// |Tr(W W^H) - 1|
  double unit_trace_deviation() const;

  bool shares_storage(const LiftedPoint& other) const {
    return entries_ == other.entries_;
  }

 private:
  explicit LiftedPoint(std::shared_ptr<const CMatrix> entries)
      : entries_(std::move(entries)) {}
  std::shared_ptr<const CMatrix> entries_;
};

/// A tangent vector together with the point it is attached to.
class TangentVector {
 public:
  static TangentVector zero(const LiftedPoint& base);

  /// Wraps `entries` after checking tangency at `base`
  /// (|Re Tr(base^H entries)| <= kTangencyTol * max(1, ||entries||_F)).
  static TangentVector checked(const LiftedPoint& base, CMatrix entries);

  const CMatrix& matrix() const { return entries_; }
  const LiftedPoint& base() const { return base_; }

  /// |Re Tr(base^H entries)|
  double tangency_residual() const;

  TangentVector operator-() const { return {base_, -entries_}; }
  friend TangentVector operator*(double s, const TangentVector& v) {
    return {v.base_, s * v.entries_};
  }
  friend TangentVector operator+(const TangentVector& a, const TangentVector& b);
  friend TangentVector operator-(const TangentVector& a, const TangentVector& b);

 private:
  friend TangentVector project(const LiftedPoint&, const CMatrix&);
  TangentVector(LiftedPoint base, CMatrix entries)
      : base_(std::move(base)), entries_(std::move(entries)) {}

  LiftedPoint base_;
  CMatrix entries_;
};

double metric_inner(const TangentVector& xi, const TangentVector& zeta);
double norm(const TangentVector& xi);

/// Orthogonal projection onto the tangent space: G - Re Tr(W^H G) W.
TangentVector project(const LiftedPoint& base, const CMatrix& g);

/// (W + alpha xi) / ||W + alpha xi||_F. alpha == 0 returns `base` unchanged.
LiftedPoint retract(const LiftedPoint& base, const TangentVector& xi, double alpha);

/// Projection-based transport of `xi` into the tangent space at `to`.
TangentVector transport(const LiftedPoint& from, const LiftedPoint& to,
                        const TangentVector& xi);

/// i.i.d. standard complex Gaussian entries of shape (m + 1) x k, normalized.
LiftedPoint random_point(Index m, Index k, std::mt19937_64& rng);

/// Chordal distance ||a - b||_F.
double distance(const LiftedPoint& a, const LiftedPoint& b);

}  // namespace isac::manifold
