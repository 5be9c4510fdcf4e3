#include <cmath>

#include <gtest/gtest.h>

#include "wreach/errors.hpp"
#include "wreach/scenarios.hpp"

using namespace wreach;

TEST(BuildScenario, Example1) {
  auto s = build_scenario("example1", {}, 42);
  EXPECT_TRUE(std::holds_alternative<BallField>(s.field.variant()));
  EXPECT_TRUE(std::holds_alternative<HalfM2Squared>(s.lyapunov.variant()));
  EXPECT_EQ(s.target.size(), 1u);
  EXPECT_EQ(moment2(s.target).value, 0.0);
  EXPECT_EQ(s.initial.size(), 8u);
}

TEST(BuildScenario, SeededInitialIsDeterministic) {
  auto a = build_scenario("example1", {}, 5), b = build_scenario("example1", {}, 5);
  auto c = build_scenario("example1", {}, 6);
  EXPECT_EQ(a.initial.points(), b.initial.points());
  EXPECT_NE(a.initial.points(), c.initial.points());
}

TEST(BuildScenario, Example2TargetIsCentered) {
  ScenarioParams params;
  params.k = 1.0;
  params.quantization = 16;
  auto s = build_scenario("example2", params, 1);
  EXPECT_TRUE(std::holds_alternative<LinearField>(s.field.variant()));
  EXPECT_EQ(s.target.size(), 16u);
  EXPECT_LE(s.target.mean().norm(), 1e-12);
  EXPECT_DOUBLE_EQ(s.lyapunov.rate_alpha(), 2.0);
  EXPECT_NEAR(eval_V(s.lyapunov, s.target), 0.0, 1e-15);
}

TEST(BuildScenario, UnknownName) {
  EXPECT_THROW(build_scenario("example3", {}, 0), ParameterError);
}

TEST(BuildScenario, Example2NeedsPlaneAndSquareGrid) {
  ScenarioParams params;
  params.dim = 3;
  EXPECT_THROW(build_scenario("example2", params, 0), ParameterError);
  params.dim = 2;
  params.quantization = 10;
  EXPECT_THROW(build_scenario("example2", params, 0), ParameterError);
}

TEST(GaussHermite, MomentsOfNormalizedGaussian) {
  // The probability density proportional to exp(-x^2) has variance 1/2 and
  // fourth moment 3/4.
  for (std::size_t m : {2u, 3u, 4u, 7u}) {
    auto rule = gauss_hermite(m);
    EXPECT_NEAR(rule.weights.sum(), 1.0, 1e-15);
    EXPECT_NEAR(rule.weights.dot(rule.nodes), 0.0, 1e-15);
    EXPECT_NEAR(rule.weights.dot(rule.nodes.array().square().matrix()), 0.5, 1e-13);
    if (m >= 3) EXPECT_NEAR(rule.weights.dot(rule.nodes.array().pow(4).matrix()), 0.75, 1e-13);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
      EXPECT_EQ(rule.nodes(i), -rule.nodes(rule.nodes.size() - 1 - i));
      EXPECT_EQ(rule.weights(i), rule.weights(rule.nodes.size() - 1 - i));
    }
  }
  EXPECT_NEAR(gauss_hermite(2).nodes(1), std::sqrt(0.5), 1e-15);
}

TEST(GaussianQuantization, SymmetricGrid) {
  for (std::size_t N : {1u, 4u, 9u, 16u, 25u}) {
    auto nu = gaussian_quantization(N);
    EXPECT_EQ(nu.size(), N);
    EXPECT_LE(nu.mean().norm(), 1e-12);
    EXPECT_NEAR(std::pow(moment2(nu).value, 2), N == 1 ? 0.0 : 1.0, 1e-12);
  }
}

TEST(AnalyticReference, Example1) {
  ScenarioParams params;
  Matrix X(2, 2);
  X << 1, 0, -1, 0;
  params.initial = DiscreteMeasure::uniform(X);
  auto s = build_scenario("example1", params, 0);
  EXPECT_DOUBLE_EQ(std::get<double>(analytic_reference(s, "V", 0.0)), 0.5);
  EXPECT_NEAR(std::get<double>(analytic_reference(s, "V", 1.0)), std::exp(-2.0) / 2.0, 1e-15);
  auto mu = std::get<DiscreteMeasure>(analytic_reference(s, "trajectory", 1.0));
  EXPECT_NEAR(mu.point(0)(0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(std::get<double>(analytic_reference(s, "w2_to_target", 2.0)), std::exp(-2.0), 1e-15);
  EXPECT_THROW(analytic_reference(s, "mean_norm", 0.0), ParameterError);
}

TEST(AnalyticReference, Example1TrajectoryIsAdmissible) {
  auto s = build_scenario("example1", {}, 3);
  TrajectoryRecord rec;
  const double h = 0.05;
  for (int k = 0; k <= 40; ++k) {
    rec.times.push_back(k * h);
    rec.measures.push_back(std::get<DiscreteMeasure>(analytic_reference(s, "trajectory", k * h)));
  }
  for (int k = 0; k < 40; ++k)
    rec.velocities.push_back(Displacement{rec.measures[k], -s.params.alpha * rec.measures[k].points()});
  EXPECT_TRUE(check_admissible(s.field, rec, 1e-9).pass);
}

TEST(AnalyticReference, Example2MeanNorm) {
  auto s = build_scenario("example2", {}, 4);
  const double m0 = s.initial.mean().norm();
  EXPECT_NEAR(std::get<double>(analytic_reference(s, "mean_norm", 1.5)), std::exp(-1.5) * m0, 1e-15);
  EXPECT_THROW(analytic_reference(s, "V", 0.0), ParameterError);
}

TEST(Example2, SimulatedMeanMatchesReference) {
  auto s = build_scenario("example2", {}, 9);
  auto traj = integrate(s.field, s.initial, Selection::max_contraction(), 1e-3, 3.0);
  for (std::size_t k = 0; k < traj.times.size(); k += 100) {
    const double ref = std::get<double>(analytic_reference(s, "mean_norm", traj.times[k]));
    EXPECT_LE(std::abs(traj.measures[k].mean().norm() - ref) / ref, 1e-3);
  }
}
