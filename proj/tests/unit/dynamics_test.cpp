#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "wreach/dynamics.hpp"
#include "wreach/errors.hpp"

using namespace wreach;

namespace {

Vector v2(double a, double b) { return (Vector(2) << a, b).finished(); }

Matrix rot() { return (Matrix(2, 2) << 0, 1, -1, 0).finished(); }

FieldSpec example2_field(double k = 1.0) { return FieldSpec::linear(rot(), -k * Matrix::Identity(2, 2), k); }

DiscreteMeasure two_point() {
  Matrix X(2, 2);
  X << 1, 0, -1, 0;
  return DiscreteMeasure::uniform(X);
}

FieldSpec zero_field() {
  GenericBall g{"zero", [](const Vector& x, const DiscreteMeasure&) { return Vector::Zero(x.size()).eval(); },
                [](const Vector&, const DiscreteMeasure&) { return 0.0; }};
  return FieldSpec::generic_ball(g, 0.0, 0.0);
}

}  // namespace

TEST(FieldEval, BallExamples) {
  auto F = FieldSpec::ball(1.0);
  auto img = field_eval(F, v2(1, 0), DiscreteMeasure::dirac(v2(1, 0)));
  EXPECT_EQ(img.center, Vector::Zero(2));
  EXPECT_DOUBLE_EQ(img.radius, 2.0);
  auto origin = field_eval(F, v2(0, 0), DiscreteMeasure::dirac(v2(0, 0)));
  EXPECT_TRUE(origin.is_singleton());
}

TEST(FieldEval, LinearExample) {
  auto img = field_eval(example2_field(), v2(1, 0), DiscreteMeasure::dirac(v2(1, 0)));
  EXPECT_TRUE(img.is_singleton());
  EXPECT_LE((img.center - v2(-1, -1)).norm(), 1e-15);
}

TEST(FieldEval, DimensionMismatch) {
  EXPECT_THROW(field_eval(FieldSpec::ball(1.0), Vector::Zero(3), two_point()), DimensionError);
  EXPECT_THROW(field_eval(example2_field(), Vector::Zero(3), DiscreteMeasure::dirac(Vector::Zero(3))),
               DimensionError);
}

TEST(FieldSpec, Constants) {
  auto ball = FieldSpec::ball(0.7);
  EXPECT_EQ(ball.lipschitz_L(), 0.7);
  EXPECT_EQ(ball.k_F(), 0.0);
  Matrix A = rot() * 3.0;
  auto lin = FieldSpec::linear(A, -2.0 * Matrix::Identity(2, 2), 2.0);
  EXPECT_NEAR(lin.lipschitz_L(), 3.0, 1e-12);
  EXPECT_EQ(lin.k_F(), 0.0);
  EXPECT_THROW(FieldSpec::ball(0.0), ParameterError);
}

TEST(FieldSpec, LinearRejectsNonDissipativeB) {
  EXPECT_THROW(FieldSpec::linear(rot(), Matrix::Identity(2, 2), 1.0), ConstructionError);
  EXPECT_THROW(FieldSpec::linear(rot(), -0.5 * Matrix::Identity(2, 2), 1.0), ConstructionError);
}

TEST(FieldSpec, EmpiricalLipschitzWithinAnalytic) {
  EXPECT_LE(empirical_lipschitz(FieldSpec::ball(1.0), 2, 200, 1), 1.0 + 1e-12);
  EXPECT_LE(empirical_lipschitz(example2_field(), 2, 200, 1), example2_field().lipschitz_L() + 1e-12);
}

TEST(BallSet, ProjectionAndArgmin) {
  BallSet b{v2(1, 1), 2.0};
  EXPECT_EQ(b.distance(v2(1, 2)), 0.0);
  EXPECT_NEAR(b.distance(v2(1, 5)), 2.0, 1e-15);
  EXPECT_LE((b.project(v2(1, 5)) - v2(1, 3)).norm(), 1e-15);
  EXPECT_LE((b.argmin_inner(v2(0, 3)) - v2(1, -1)).norm(), 1e-15);
  EXPECT_NEAR(b.min_inner(v2(0, 3)), -3.0, 1e-15);
  EXPECT_EQ(b.argmin_inner(Vector::Zero(2)), b.center);
}

TEST(Integrate, BallAnalyticDecay) {
  auto traj = integrate(FieldSpec::ball(1.0), DiscreteMeasure::dirac(v2(1, 0)), Selection::linear_decay(1.0), 1e-3, 1.0);
  EXPECT_EQ(traj.steps(), 1000u);
  EXPECT_LE((traj.terminal().point(0) - v2(std::exp(-1.0), 0)).norm(), 1e-3);
  EXPECT_DOUBLE_EQ(traj.times.back(), 1.0);
}

TEST(Integrate, LinearFieldConservesNormsOfCenteredCloud) {
  Matrix X(4, 2);
  X << 1, 0.5, -1, -0.5, 0.3, -2, -0.3, 2;
  auto mu0 = DiscreteMeasure::uniform(X);
  auto traj = integrate(example2_field(), mu0, Selection::max_contraction(), 1e-3, 1.0);
  for (std::size_t i = 0; i < mu0.size(); ++i) {
    const double r0 = mu0.point(i).norm();
    EXPECT_LE(std::abs(traj.terminal().point(i).norm() - r0) / r0, 5e-3);
  }
}

TEST(Integrate, StationaryAtOrigin) {
  auto mu0 = DiscreteMeasure::dirac(Vector::Zero(2));
  auto traj = integrate(zero_field(), mu0, Selection::max_expansion(), 0.1, 1.0);
  for (const auto& mu : traj.measures) EXPECT_EQ(mu.points(), mu0.points());
  auto traj2 = integrate(FieldSpec::ball(1.0), mu0, Selection::max_expansion(), 0.1, 1.0);
  EXPECT_EQ(traj2.terminal().points(), mu0.points());
}

TEST(Integrate, WeightsAndCardinalityPreserved) {
  std::mt19937_64 rng(7);
  auto mu0 = DiscreteMeasure::make(oracle::random_points(rng, 5, 2, 1.0), oracle::random_weights(rng, 5));
  auto traj = integrate(FieldSpec::ball(0.5), mu0, Selection::max_expansion(), 1e-2, 0.5);
  for (const auto& mu : traj.measures) EXPECT_EQ(mu.weights(), mu0.weights());
  for (std::size_t k = 1; k < traj.times.size(); ++k) EXPECT_GT(traj.times[k], traj.times[k - 1]);
}

TEST(Integrate, ProjectsOutsideProposals) {
  auto too_fast = Selection::analytic("too_fast", [](double, const Vector& x) -> Vector { return -10.0 * x; });
  auto traj = integrate(FieldSpec::ball(1.0), two_point(), too_fast, 1e-2, 0.2);
  EXPECT_GT(traj.diagnostics.front().projected, 0u);
  EXPECT_TRUE(check_admissible(FieldSpec::ball(1.0), traj, 1e-9).pass);
}

TEST(Integrate, RejectsBadStep) {
  EXPECT_THROW(integrate(FieldSpec::ball(1.0), two_point(), Selection::linear_decay(1.0), 0.0, 1.0), ParameterError);
  EXPECT_THROW(integrate(FieldSpec::ball(1.0), two_point(), Selection::linear_decay(1.0), 0.1, -1.0), ParameterError);
}

TEST(Integrate, BlowUpReportsStep) {
  auto nan_at_3 = Selection::analytic("nan", [](double t, const Vector& x) -> Vector {
    return t > 0.25 ? Vector::Constant(x.size(), NAN) : Vector::Zero(x.size());
  });
  try {
    integrate(FieldSpec::ball(1.0), two_point(), nan_at_3, 0.1, 1.0);
    FAIL() << "expected IntegrationError";
  } catch (const IntegrationError& e) {
    EXPECT_EQ(e.step(), 3u);
  }
}

TEST(Integrate, GluingIsBitIdentical) {
  std::mt19937_64 rng(8);
  auto mu0 = DiscreteMeasure::make(oracle::random_points(rng, 6, 2, 1.0), oracle::random_weights(rng, 6));
  auto F = FieldSpec::ball(1.0);
  for (const auto& sel : {Selection::linear_decay(1.0), Selection::max_contraction()}) {
    auto whole = integrate(F, mu0, sel, 1e-2, 2.0);
    auto first = integrate(F, mu0, sel, 1e-2, 1.0);
    auto second = integrate(F, first.terminal(), sel, 1e-2, 1.0, 1.0);
    EXPECT_EQ(second.terminal().points(), whole.terminal().points());
    EXPECT_EQ(rollout(F, mu0, sel, 1e-2, 2.0).points(), whole.terminal().points());
  }
}

TEST(Integrate, GreedyFallsBackToPreviousP) {
  int calls = 0;
  auto src = [&calls](const DiscreteMeasure& mu) -> std::optional<Displacement> {
    if (calls++ % 2 == 1) return std::nullopt;
    return Displacement{mu, mu.points()};
  };
  auto traj = integrate(FieldSpec::ball(1.0), two_point(), Selection::greedy(src), 0.1, 0.4);
  ASSERT_EQ(traj.diagnostics.size(), 4u);
  EXPECT_FALSE(traj.diagnostics[0].fallback);
  EXPECT_TRUE(traj.diagnostics[1].fallback);
  EXPECT_TRUE(check_admissible(FieldSpec::ball(1.0), traj, 1e-9).pass);
}

TEST(CheckAdmissible, IntegratedTrajectoriesPass) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    auto mu0 = DiscreteMeasure::make(oracle::random_points(rng, 4, 2, 3.0), oracle::random_weights(rng, 4));
    for (const auto& sel : {Selection::max_contraction(), Selection::max_expansion(), Selection::linear_decay(3.0)}) {
      auto rep = check_admissible(FieldSpec::ball(1.0), integrate(FieldSpec::ball(1.0), mu0, sel, 1e-2, 0.3), 1e-9);
      EXPECT_TRUE(rep.pass);
      EXPECT_TRUE(rep.growth_ok);
    }
    auto lin = integrate(example2_field(), mu0, Selection::max_contraction(), 1e-2, 0.3);
    EXPECT_TRUE(check_admissible(example2_field(), lin, 1e-9).pass);
  }
}

TEST(CheckAdmissible, DoubledVelocitiesFail) {
  auto F = FieldSpec::ball(1.0);
  Matrix X(2, 2);
  X << 2, 0, 0, 0;  // m2 = sqrt(2) < |x_0| = 2
  auto traj = integrate(F, DiscreteMeasure::uniform(X), Selection::max_contraction(), 1e-2, 0.1);
  for (auto& v : traj.velocities) v.vectors *= 2.0;
  auto rep = check_admissible(F, traj, 1e-9);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.max_residual, 0.0);
}

TEST(CheckAdmissible, StationaryDiracPasses) {
  auto traj = integrate(FieldSpec::ball(1.0), DiscreteMeasure::dirac(Vector::Zero(2)), Selection::max_contraction(), 0.1, 1.0);
  EXPECT_TRUE(check_admissible(FieldSpec::ball(1.0), traj, 1e-9).pass);
}

TEST(AprioriBounds, SpotValue) {
  GenericBall g{"unit", [](const Vector& x, const DiscreteMeasure&) { return Vector::Zero(x.size()).eval(); },
                [](const Vector&, const DiscreteMeasure&) { return 1.0; }};
  auto F = FieldSpec::generic_ball(g, 1.0, 1.0);
  auto b = apriori_bounds(F, DiscreteMeasure::dirac(v2(1, 0)), 0.0, 1.0);
  EXPECT_NEAR(b.C_ab, 2.0 * std::exp(1.0), 1e-12);
  EXPECT_NEAR(b.M, std::exp(std::exp(1.0)) * 2.0 * std::exp(1.0), 1e-9);
}

TEST(AprioriBounds, ZeroLipschitzLimit) {
  GenericBall g{"const", [](const Vector& x, const DiscreteMeasure&) { return Vector::Zero(x.size()).eval(); },
                [](const Vector&, const DiscreteMeasure&) { return 0.5; }};
  auto F = FieldSpec::generic_ball(g, 0.0, 0.5);
  auto b = apriori_bounds(F, two_point(), 1.0, 3.0);
  EXPECT_DOUBLE_EQ(b.C_ab, 1.0 + 0.5 * 2.0);
  EXPECT_DOUBLE_EQ(b.D_ab, 0.25);
}

TEST(AprioriBounds, DiracAtOriginIsZero) {
  auto b = apriori_bounds(FieldSpec::ball(1.0), DiscreteMeasure::dirac(Vector::Zero(2)), 0.0, 1.0);
  EXPECT_EQ(b.C_ab, 0.0);
  EXPECT_EQ(b.M, 0.0);
  EXPECT_THROW(apriori_bounds(FieldSpec::ball(1.0), two_point(), 1.0, 1.0), ParameterError);
}
