#include <sstream>

#include <gtest/gtest.h>

#include "wreach/errors.hpp"
#include "wreach/io.hpp"

using namespace wreach;

namespace {

DiscreteMeasure sample() {
  Matrix X(3, 2);
  X << 0.1, -2, 1.0 / 3.0, 4, 1e-300, 7;
  Vector w(3);
  w << 0.2, 0.3, 0.5;
  return DiscreteMeasure::make(X, w);
}

}  // namespace

TEST(Io, FormatRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-17, 6.02214076e23}) EXPECT_EQ(std::stod(io::fmt(x)), x);
}

TEST(Io, MeasureJsonRoundTrip) {
  auto nu = sample();
  auto back = io::measure_from_json(io::measure_to_json(nu));
  EXPECT_EQ(back.points(), nu.points());
  EXPECT_LE((back.weights() - nu.weights()).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Io, MeasureJsonDefaultsToUniform) {
  auto nu = io::measure_from_json(nlohmann::json::parse(R"({"points": [[1, 0], [-1, 0]]})"));
  EXPECT_EQ(nu.weight(0), 0.5);
}

TEST(Io, MeasureJsonRejectsMalformed) {
  EXPECT_THROW(io::measure_from_json(nlohmann::json::parse(R"({"weights": [1]})")), ConstructionError);
  EXPECT_THROW(io::measure_from_json(nlohmann::json::parse(R"({"points": [[1, 0], [1]]})")), DimensionError);
  EXPECT_THROW(io::measure_from_json(nlohmann::json::parse(R"({"points": [[1, 0]], "weights": [0]})")),
               ConstructionError);
}

TEST(Io, MeasureCsvRoundTrip) {
  auto nu = sample();
  std::stringstream ss;
  io::write_measure_csv(ss, nu);
  EXPECT_EQ(ss.str().substr(0, 8), "x1,x2,w\n");
  auto back = io::read_measure_csv(ss);
  EXPECT_EQ(back.points(), nu.points());
  EXPECT_LE((back.weights() - nu.weights()).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Io, PlanJson) {
  auto nu = sample();
  auto j = io::plan_to_json(solve_ot(nu, nu));
  EXPECT_EQ(j["matrix"].size(), 3u);
  EXPECT_NEAR(j["cost"].get<double>(), 0.0, 1e-15);
  EXPECT_TRUE(j["optimal"].get<bool>());
}

TEST(Io, TrajectoryCsvShape) {
  auto traj = integrate(FieldSpec::ball(1.0), sample(), Selection::linear_decay(1.0), 0.5, 1.0);
  std::stringstream ss;
  io::write_trajectory_csv(ss, traj);
  std::string line;
  std::getline(ss, line);
  EXPECT_EQ(line, "t,particle,x1,x2,v1,v2,w");
  int rows = 0;
  while (std::getline(ss, line)) ++rows;
  EXPECT_EQ(rows, 9);
}
