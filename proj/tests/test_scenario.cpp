#include "isac/scenario.h"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace isac;
using namespace isac::scenario;

namespace {

LinkBudget standard_budget() {
  return {dbm_to_watts(-80.0), dbm_to_watts(30.0), dbm_to_watts(20.0)};
}

}  // namespace

TEST(Scenario, UnitConversions) {
  EXPECT_DOUBLE_EQ(dbm_to_watts(30.0), 1.0);
  EXPECT_NEAR(dbm_to_watts(-80.0), 1e-11, 1e-25);
  EXPECT_NEAR(dbm_to_watts(20.0), 0.1, 1e-15);
  EXPECT_NEAR(watts_to_dbm(0.1), 20.0, 1e-12);
  EXPECT_NEAR(db_to_linear(-30.0), 1e-3, 1e-18);
  EXPECT_NEAR(deg_to_rad(180.0), std::numbers::pi, 1e-15);
}

TEST(Scenario, PathlossAtReferenceDistance) {
  GeometryConfig g;
  EXPECT_NEAR(pathloss(1.0, g), 1e-3, 1e-18);
  g.nu = 3.7;
  g.D0 = 2.5;
  EXPECT_NEAR(pathloss(2.5, g), 1e-3, 1e-18);
}

TEST(Scenario, PathlossTenMeters) {
  GeometryConfig g;
  EXPECT_NEAR(pathloss(10.0, g), 1e-5, 1e-20);
}

TEST(Scenario, PathlossRejectsNonPositiveDistance) {
  GeometryConfig g;
  EXPECT_THROW(pathloss(0.0, g), DomainError);
  EXPECT_THROW(pathloss(-1.0, g), DomainError);
}

TEST(Scenario, PathlossInUnitIntervalForDefaultGeometry) {
  GeometryConfig g;
  for (double d = 30.0; d <= 90.0; d += 1.0) {
    const double z = pathloss(d, g);
    EXPECT_GT(z, 0.0);
    EXPECT_LT(z, 1.0);
  }
}

TEST(Scenario, SteeringBroadside) {
  CVector a = steering(0.0, 4);
  for (Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(a(i) - Complex(0.5, 0.0)), 0.0, 1e-15);
}

TEST(Scenario, SteeringEndfire) {
  CVector a = steering(std::numbers::pi / 2, 2);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(a(0) - Complex(r, 0.0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a(1) - Complex(-r, 0.0)), 0.0, 1e-15);
}

TEST(Scenario, SteeringHasUnitNormAndLinearPhase) {
  for (Index m : {1, 3, 8, 16, 64}) {
    for (double deg = -90.0; deg <= 90.0; deg += 7.5) {
      const double th = deg_to_rad(deg);
      CVector a = steering(th, m);
      double s = 0.0;
      for (Index i = 0; i < m; ++i) s += std::norm(a(i));
      EXPECT_NEAR(s, 1.0, 1e-12);
      for (Index i = 1; i < m; ++i) {
        // consecutive elements differ by e^{j pi sin th}
        EXPECT_NEAR(std::abs(a(i) - a(i - 1) * std::polar(1.0, std::numbers::pi * std::sin(th))),
                    0.0, 1e-12);
      }
    }
  }
}

TEST(Scenario, SamplingIsDeterministic) {
  GeometryConfig g;
  std::mt19937_64 r1(7), r2(7);
  auto a = sample_channels(g, 16, 2, standard_budget(), r1);
  auto b = sample_channels(g, 16, 2, standard_budget(), r2);
  EXPECT_TRUE(a.H == b.H);
  EXPECT_TRUE(a.A == b.A);
  EXPECT_EQ(a.user_distances, b.user_distances);
}

TEST(Scenario, SensingColumnsAreSteeringVectorsAtTargets) {
  GeometryConfig g;
  std::mt19937_64 rng(3);
  auto s = sample_channels(g, 16, 2, standard_budget(), rng);
  ASSERT_EQ(s.A.cols(), 4);
  const double targets[] = {-54.0, -18.0, 18.0, 54.0};
  for (Index n = 0; n < 4; ++n) {
    EXPECT_LE((s.A.col(n) - steering(deg_to_rad(targets[n]), 16)).norm(), 1e-15);
    EXPECT_NEAR(s.A.col(n).norm(), 1.0, 1e-12);
  }
  for (Index n = 0; n < 4; ++n) EXPECT_NEAR(s.gamma_th(n), 0.1, 1e-15);
}

TEST(Scenario, FixedPlacementUsesRegionCenterDistance) {
  GeometryConfig g;
  std::mt19937_64 rng(3);
  auto s = sample_channels(g, 8, 2, standard_budget(), rng);
  for (double d : s.user_distances) EXPECT_NEAR(d, std::hypot(50.0, 30.0), 1e-12);
}

TEST(Scenario, RandomDiskPlacementStaysInDisk) {
  GeometryConfig g;
  g.placement = UserPlacement::random_disk;
  std::mt19937_64 rng(4);
  const double c = std::hypot(50.0, 30.0);
  for (int t = 0; t < 200; ++t) {
    auto s = sample_channels(g, 4, 3, standard_budget(), rng);
    for (double d : s.user_distances) {
      EXPECT_GE(d, c - 20.0 - 1e-9);
      EXPECT_LE(d, c + 20.0 + 1e-9);
    }
  }
}

TEST(Scenario, ChannelPowerMatchesPathloss) {
  // E||h_k||^2 / M = zeta_k; the sample mean over 10^4 draws lies within
  // 3 standard errors. ||h||^2 / (M zeta) ~ Gamma(M, 1/M) with variance 1/M.
  GeometryConfig g;
  const Index m = 8;
  const int draws = 10000;
  std::mt19937_64 rng(11);
  const double zeta = pathloss(std::hypot(50.0, 30.0), g);
  double sum = 0.0;
  for (int t = 0; t < draws; ++t) {
    auto s = sample_channels(g, m, 1, standard_budget(), rng);
    sum += s.H.col(0).squaredNorm() / (static_cast<double>(m) * zeta);
  }
  const double mean = sum / draws;
  const double se = std::sqrt(1.0 / static_cast<double>(m) / draws);
  EXPECT_NEAR(mean, 1.0, 3.0 * se);
}

TEST(Scenario, ConfigurationErrorsAreReported) {
  GeometryConfig g;
  g.sensing_angles_deg.clear();
  std::mt19937_64 rng(1);
  EXPECT_THROW(sample_channels(g, 4, 2, standard_budget(), rng), ConfigError);
  GeometryConfig h;
  h.user_angles_deg.clear();
  EXPECT_THROW(sample_channels(h, 4, 2, standard_budget(), rng), ConfigError);
  GeometryConfig k;
  EXPECT_THROW(sample_channels(k, 4, 3, standard_budget(), rng), ConfigError);  // only two angles
  GeometryConfig bad;
  bad.user_region_radius = -1.0;
  bad.nu = 0.0;
  bad.sensing_angles_deg = {100.0};
  try {
    bad.validate();
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.problems().size(), 3u);
  }
}

TEST(Scenario, LiftScalesChannelsAndZeroesLastRow) {
  GeometryConfig g;
  std::mt19937_64 rng(5);
  LinkBudget b = standard_budget();
  b.p_max = dbm_to_watts(33.0);
  auto s = sample_channels(g, 6, 2, b, rng);
  auto l = lift(s);
  EXPECT_EQ(l.P, s.p_max);
  EXPECT_EQ(l.H_hat.rows(), 7);
  EXPECT_TRUE(l.H_hat.row(6).isZero(0.0));
  EXPECT_TRUE(l.A_hat.row(6).isZero(0.0));
  for (Index k = 0; k < 2; ++k) {
    EXPECT_NEAR(l.H_hat.col(k).squaredNorm(), s.p_max * s.H.col(k).squaredNorm(),
                1e-12 * s.p_max * s.H.col(k).squaredNorm());
  }
  for (Index n = 0; n < l.A_hat.cols(); ++n) {
    EXPECT_NEAR(l.A_hat.col(n).squaredNorm(), s.p_max, 1e-12 * s.p_max);
  }
  EXPECT_EQ(l.sigma2, s.sigma2);
  EXPECT_TRUE(l.gamma_th == s.gamma_th);
  EXPECT_TRUE(l.H_hat.topRows(6) == std::sqrt(s.p_max) * s.H);
}

TEST(Scenario, LiftIsLinearInChannelScale) {
  GeometryConfig g;
  std::mt19937_64 rng(6);
  auto s = sample_channels(g, 5, 2, standard_budget(), rng);
  auto scaled = s;
  scaled.H *= 3.0;
  EXPECT_LE((lift(scaled).H_hat - 3.0 * lift(s).H_hat).norm(), 1e-15 * lift(s).H_hat.norm());
}
