#include "isac/manifold.h"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace isac;
using namespace isac::manifold;

namespace {

CMatrix random_matrix(Index r, Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  CMatrix m(r, c);
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) m(i, j) = Complex(n(rng), n(rng));
  }
  return m;
}

// Sum of |x_ij|^2 written out entry by entry.
double frob2_by_hand(const CMatrix& x) {
  double s = 0.0;
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      s += x(i, j).real() * x(i, j).real() + x(i, j).imag() * x(i, j).imag();
    }
  }
  return s;
}

// Re Tr(a^H b) written out entry by entry.
double re_trace_by_hand(const CMatrix& a, const CMatrix& b) {
  Complex s = 0.0;
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) s += std::conj(a(i, j)) * b(i, j);
  }
  return s.real();
}

TangentVector random_tangent(const LiftedPoint& w, std::mt19937_64& rng) {
  return project(w, random_matrix(w.rows(), w.cols(), rng));
}

}  // namespace

TEST(Manifold, NormalizeProducesUnitTrace) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    auto w = LiftedPoint::normalize(random_matrix(5, 3, rng) * 37.0);
    EXPECT_NEAR(frob2_by_hand(w.matrix()), 1.0, 1e-12);
  }
}

TEST(Manifold, NormalizeRejectsZeroAndNonFinite) {
  EXPECT_THROW(LiftedPoint::normalize(CMatrix::Zero(3, 2)), DomainError);
  CMatrix bad = CMatrix::Ones(3, 2);
  bad(1, 1) = Complex(std::nan(""), 0.0);
  EXPECT_THROW(LiftedPoint::normalize(bad), DomainError);
}

TEST(Manifold, FromUnitRejectsOffSphere) {
  EXPECT_THROW(LiftedPoint::from_unit(CMatrix::Ones(2, 2)), DomainError);
  CMatrix e = CMatrix::Zero(2, 2);
  e(0, 0) = 1.0;
  EXPECT_NO_THROW(LiftedPoint::from_unit(e));
}

TEST(Manifold, MetricOfZeroVectorIsZero) {
  std::mt19937_64 rng(2);
  auto w = random_point(4, 2, rng);
  auto z = TangentVector::zero(w);
  EXPECT_EQ(metric_inner(z, z), 0.0);
}

TEST(Manifold, MetricIsSymmetric) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 20; ++t) {
    auto w = random_point(4, 3, rng);
    auto a = random_tangent(w, rng);
    auto b = random_tangent(w, rng);
    EXPECT_DOUBLE_EQ(metric_inner(a, b), metric_inner(b, a));
  }
}

TEST(Manifold, MetricIsPositiveAndMatchesEntrySum) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 20; ++t) {
    auto w = random_point(6, 2, rng);
    auto a = random_tangent(w, rng);
    const double expected = frob2_by_hand(a.matrix());
    EXPECT_GT(metric_inner(a, a), 0.0);
    EXPECT_NEAR(metric_inner(a, a), expected, 1e-12 * expected);
  }
}

TEST(Manifold, MetricRejectsShapeMismatch) {
  std::mt19937_64 rng(5);
  auto w1 = random_point(3, 2, rng);
  auto w2 = random_point(4, 2, rng);
  EXPECT_THROW(metric_inner(TangentVector::zero(w1), TangentVector::zero(w2)), DimensionError);
}

TEST(Manifold, ProjectOfBaseIsZero) {
  std::mt19937_64 rng(6);
  auto w = random_point(5, 2, rng);
  auto p = project(w, w.matrix());
  EXPECT_LE(p.matrix().norm(), 1e-15);
}

TEST(Manifold, ProjectIsIdentityOnTangentVectors) {
  std::mt19937_64 rng(7);
  auto w = random_point(5, 3, rng);
  auto xi = random_tangent(w, rng);
  auto again = project(w, xi.matrix());
  EXPECT_LE((again.matrix() - xi.matrix()).norm(), 1e-12 * xi.matrix().norm());
}

TEST(Manifold, ProjectResultIsTangent) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    auto w = random_point(7, 3, rng);
    const CMatrix g = random_matrix(8, 3, rng) * 100.0;
    auto p = project(w, g);
    EXPECT_LE(std::abs(re_trace_by_hand(w.matrix(), p.matrix())), 1e-10 * g.norm());
  }
}

TEST(Manifold, ProjectIsOrthogonalProjector) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 20; ++t) {
    auto w = random_point(4, 2, rng);
    const CMatrix g = random_matrix(5, 2, rng);
    const CMatrix residual = g - project(w, g).matrix();
    auto xi = random_tangent(w, rng);
    EXPECT_LE(std::abs(re_trace_by_hand(xi.matrix(), residual)), 1e-10 * g.norm());
  }
}

TEST(Manifold, ProjectRejectsShapeMismatch) {
  std::mt19937_64 rng(10);
  auto w = random_point(3, 2, rng);
  EXPECT_THROW(project(w, CMatrix::Zero(3, 2)), DimensionError);
}

TEST(Manifold, CheckedRejectsNonTangent) {
  std::mt19937_64 rng(11);
  auto w = random_point(3, 2, rng);
  EXPECT_THROW(TangentVector::checked(w, w.matrix()), DomainError);
  EXPECT_NO_THROW(TangentVector::checked(w, project(w, random_matrix(4, 2, rng)).matrix()));
}

TEST(Manifold, RetractZeroStepReturnsBaseExactly) {
  std::mt19937_64 rng(12);
  auto w = random_point(4, 2, rng);
  auto xi = random_tangent(w, rng);
  auto r = retract(w, xi, 0.0);
  EXPECT_TRUE(r.matrix() == w.matrix());
}

TEST(Manifold, RetractStaysOnSphere) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> step(0.0, 10.0);
  for (int t = 0; t < 100; ++t) {
    auto w = random_point(6, 3, rng);
    auto xi = random_tangent(w, rng);
    auto r = retract(w, xi, step(rng));
    EXPECT_NEAR(frob2_by_hand(r.matrix()), 1.0, 1e-12);
  }
}

TEST(Manifold, RetractIsFirstOrderAccurate) {
  // ||R(t xi) - (W + t xi)|| = O(t^2): the fitted constant is stable across t.
  std::mt19937_64 rng(14);
  auto w = random_point(5, 2, rng);
  auto xi = random_tangent(w, rng);
  std::vector<double> constants;
  for (double t : {1e-3, 1e-4}) {
    const CMatrix linear = w.matrix() + t * xi.matrix();
    const double err = (retract(w, xi, t).matrix() - linear).norm();
    constants.push_back(err / (t * t));
  }
  ASSERT_GT(constants[0], 0.0);
  EXPECT_NEAR(constants[1] / constants[0], 1.0, 0.05);
}

TEST(Manifold, RetractRejectsNegativeStep) {
  std::mt19937_64 rng(15);
  auto w = random_point(3, 1, rng);
  EXPECT_THROW(retract(w, random_tangent(w, rng), -1.0), DomainError);
}

TEST(Manifold, TransportToSamePointIsIdentity) {
  std::mt19937_64 rng(16);
  auto w = random_point(4, 2, rng);
  auto xi = random_tangent(w, rng);
  auto moved = transport(w, w, xi);
  EXPECT_LE((moved.matrix() - xi.matrix()).norm(), 1e-14);
}

TEST(Manifold, TransportOfZeroIsZero) {
  std::mt19937_64 rng(17);
  auto a = random_point(4, 2, rng);
  auto b = random_point(4, 2, rng);
  EXPECT_EQ(transport(a, b, TangentVector::zero(a)).matrix().norm(), 0.0);
}

TEST(Manifold, TransportIsTangentAndLinear) {
  std::mt19937_64 rng(18);
  for (int t = 0; t < 20; ++t) {
    auto a = random_point(5, 3, rng);
    auto b = random_point(5, 3, rng);
    auto x = random_tangent(a, rng);
    auto y = random_tangent(a, rng);
    auto tx = transport(a, b, x);
    EXPECT_LE(std::abs(re_trace_by_hand(b.matrix(), tx.matrix())), 1e-10 * x.matrix().norm());
    const CMatrix lhs = transport(a, b, 2.0 * x + y).matrix();
    const CMatrix rhs = 2.0 * tx.matrix() + transport(a, b, y).matrix();
    EXPECT_LE((lhs - rhs).norm(), 1e-12);
  }
}

TEST(Manifold, TransportRejectsForeignVector) {
  std::mt19937_64 rng(19);
  auto a = random_point(3, 2, rng);
  auto b = random_point(3, 2, rng);
  auto c = random_point(4, 2, rng);
  EXPECT_THROW(transport(a, c, random_tangent(a, rng)), DimensionError);
  (void)b;
}

TEST(Manifold, RandomPointShapeAndDeterminism) {
  std::mt19937_64 r1(42), r2(42), r3(43);
  auto a = random_point(4, 2, r1);
  auto b = random_point(4, 2, r2);
  auto c = random_point(4, 2, r3);
  EXPECT_EQ(a.rows(), 5);
  EXPECT_EQ(a.cols(), 2);
  EXPECT_NEAR(frob2_by_hand(a.matrix()), 1.0, 1e-12);
  EXPECT_TRUE(a.matrix() == b.matrix());
  EXPECT_GT((a.matrix() - c.matrix()).norm(), 1e-6);
}

TEST(Manifold, DistanceProperties) {
  std::mt19937_64 rng(20);
  auto a = random_point(4, 2, rng);
  auto b = random_point(4, 2, rng);
  auto c = random_point(4, 2, rng);
  EXPECT_EQ(distance(a, a), 0.0);
  EXPECT_NEAR(distance(a, LiftedPoint::normalize(-a.matrix())), 2.0, 1e-15);
  EXPECT_NEAR(distance(a, b), distance(b, a), 1e-15);
  EXPECT_NEAR(distance(a, b), std::sqrt(frob2_by_hand(a.matrix() - b.matrix())), 1e-14);
  EXPECT_LE(distance(a, c), distance(a, b) + distance(b, c) + 1e-15);
  auto d = random_point(5, 2, rng);
  EXPECT_THROW(distance(a, d), DimensionError);
}

TEST(Manifold, TangentArithmeticRequiresCommonBase) {
  std::mt19937_64 rng(21);
  auto a = random_point(3, 2, rng);
  auto b = random_point(3, 2, rng);
  EXPECT_THROW(random_tangent(a, rng) + random_tangent(b, rng), DomainError);
}
