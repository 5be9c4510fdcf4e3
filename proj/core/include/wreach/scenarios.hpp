#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wreach/dynamics.hpp"
#include "wreach/lyapunov.hpp"

namespace wreach {

struct ScenarioParams {
  double alpha = 1.0;             // example1 ball radius factor
  double k = 1.0;                 // example2 dissipation, B = -k I
  std::size_t quantization = 16;  // example2 target atoms (perfect square)
  std::size_t particles = 8;      // size of the seeded initial cloud
  int dim = 2;
  double spread = 1.0;            // initial cloud drawn uniformly in [-spread, spread]^dim
  std::optional<DiscreteMeasure> initial;  // overrides the seeded cloud
};

/// Canonical configuration:
///   example1: ball field B(0, alpha(|x| + m2)), V = 1/2 m2^2, rate alpha, target delta_0
///   example2: F(x, mu) = A x + B mean(mu) with A the quarter rotation and B = -k I,
///             V = 1/2 W2^2(., target), rate 2k, target a tensor Gauss-Hermite
///             quantization of the density proportional to exp(-|x|^2)
struct Scenario {
  std::string name;
  FieldSpec field;
  LyapunovSpec lyapunov;
  DiscreteMeasure initial;
  DiscreteMeasure target;
  ScenarioParams params;
  std::vector<std::string> curves;  // analytic reference names
};

Scenario build_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed);

using AnalyticValue = std::variant<DiscreteMeasure, double>;

/// example1: "trajectory" (atoms scaled by e^{-alpha t}), "V" (e^{-2 alpha t} V(mu0)),
///           "w2_to_target" (e^{-alpha t} m2(mu0));
/// example2: "mean_norm" (e^{-k t} |mean(mu0)|).
AnalyticValue analytic_reference(const Scenario& scenario, const std::string& curve, double t);

struct QuadratureRule {
  Vector nodes;
  Vector weights;  // sums to one
};

/// m-point Gauss-Hermite rule for the weight exp(-x^2), normalized to a
/// probability and symmetrized about the origin.
QuadratureRule gauss_hermite(std::size_t m);

/// Tensor-product Gauss-Hermite quantization of exp(-|x|^2) in the plane with
/// N = m^2 atoms.
DiscreteMeasure gaussian_quantization(std::size_t N);

/// Seeded cloud of `n` atoms uniform in [-spread, spread]^dim with equal weights.
DiscreteMeasure random_cloud(std::size_t n, int dim, double spread, std::uint64_t seed);

}  // namespace wreach
