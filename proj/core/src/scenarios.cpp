#include "wreach/scenarios.hpp"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "wreach/errors.hpp"

namespace wreach {

QuadratureRule gauss_hermite(std::size_t m) {
  if (m == 0) throw ParameterError("gauss_hermite: need at least one node");
  const auto n = static_cast<Eigen::Index>(m);
  // Golub-Welsch: Jacobi matrix of the Hermite recurrence.
  Matrix J = Matrix::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) {
    J(i, i - 1) = J(i - 1, i) = std::sqrt(static_cast<double>(i) / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(J);
  Vector x = eig.eigenvalues();
  Vector w = eig.eigenvectors().row(0).transpose().array().square();

  QuadratureRule rule{Vector(n), Vector(n)};
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index mirror = n - 1 - i;
    rule.nodes(i) = 0.5 * (x(i) - x(mirror));
    rule.weights(i) = 0.5 * (w(i) + w(mirror));
  }
  rule.weights /= rule.weights.sum();
  return rule;
}

DiscreteMeasure gaussian_quantization(std::size_t N) {
  const auto m = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(N))));
  if (N == 0 || m * m != N) throw ParameterError("gaussian_quantization: N must be a perfect square");
  const QuadratureRule rule = gauss_hermite(m);
  Matrix pts(static_cast<Eigen::Index>(N), 2);
  Vector w(static_cast<Eigen::Index>(N));
  Eigen::Index row = 0;
  for (Eigen::Index a = 0; a < rule.nodes.size(); ++a) {
    for (Eigen::Index b = 0; b < rule.nodes.size(); ++b, ++row) {
      pts(row, 0) = rule.nodes(a);
      pts(row, 1) = rule.nodes(b);
      w(row) = rule.weights(a) * rule.weights(b);
    }
  }
  return DiscreteMeasure::make(std::move(pts), std::move(w));
}

DiscreteMeasure random_cloud(std::size_t n, int dim, double spread, std::uint64_t seed) {
  if (n == 0 || dim <= 0) throw ParameterError("random_cloud: need n >= 1 and dim >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-spread, spread);
  Matrix pts(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index i = 0; i < pts.rows(); ++i)
    for (Eigen::Index j = 0; j < dim; ++j) pts(i, j) = coord(rng);
  return DiscreteMeasure::uniform(std::move(pts));
}

Scenario build_scenario(const std::string& name, const ScenarioParams& params, std::uint64_t seed) {
  if (name == "example1") {
    if (params.dim < 1) throw ParameterError("example1: dim must be positive");
    DiscreteMeasure initial = params.initial ? *params.initial
                                             : random_cloud(params.particles, params.dim, params.spread, seed);
    if (initial.dim() != params.dim) throw DimensionError("example1: initial measure dimension mismatch");
    return Scenario{name,
                    FieldSpec::ball(params.alpha),
                    LyapunovSpec::half_m2_squared(params.alpha),
                    std::move(initial),
                    DiscreteMeasure::dirac(Vector::Zero(params.dim)),
                    params,
                    {"trajectory", "V", "w2_to_target"}};
  }
  if (name == "example2") {
    if (params.dim != 2) throw ParameterError("example2 is planar: dim must be 2");
    Matrix A(2, 2);
    A << 0.0, 1.0, -1.0, 0.0;
    const Matrix B = -params.k * Matrix::Identity(2, 2);
    DiscreteMeasure target = gaussian_quantization(params.quantization);
    DiscreteMeasure initial = params.initial ? *params.initial
                                             : random_cloud(params.particles, 2, params.spread, seed);
    if (initial.dim() != 2) throw DimensionError("example2: initial measure must be planar");
    return Scenario{name,
                    FieldSpec::linear(A, B, params.k),
                    LyapunovSpec::half_w2_squared_to(target, 2.0 * params.k),
                    std::move(initial),
                    std::move(target),
                    params,
                    {"mean_norm"}};
  }
  throw ParameterError("unknown scenario '" + name + "' (expected example1 or example2)");
}

AnalyticValue analytic_reference(const Scenario& s, const std::string& curve, double t) {
  if (s.name == "example1") {
    const double a = s.params.alpha;
    if (curve == "trajectory") {
      const double c = std::exp(-a * t);
      return push_forward(s.initial, [c](const Vector& x) -> Vector { return c * x; });
    }
    if (curve == "V") return std::exp(-2.0 * a * t) * eval_V(s.lyapunov, s.initial);
    if (curve == "w2_to_target") return std::exp(-a * t) * moment2(s.initial).value;
  } else if (s.name == "example2") {
    if (curve == "mean_norm") return std::exp(-s.params.k * t) * s.initial.mean().norm();
  }
  throw ParameterError("unknown analytic curve '" + curve + "' for scenario " + s.name);
}

}  // namespace wreach
