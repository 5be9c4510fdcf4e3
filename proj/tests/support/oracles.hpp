#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the transport or hamiltonian code under test.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline double sq_dist(const Matrix& X, Eigen::Index i, const Matrix& Y, Eigen::Index j) {
  return (X.row(i) - Y.row(j)).squaredNorm();
}

/// min over permutations s of (1/n) sum_i |x_i - y_s(i)|^2.
inline double permutation_ot_cost(const Matrix& X, const Matrix& Y) {
  const auto n = X.rows();
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) c += sq_dist(X, i, Y, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, c / static_cast<double>(n));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Optimality certificate for a transportation plan: the residual network
/// (forward arcs i->j at cost c_ij, backward arcs j->i at -c_ij wherever the
/// plan carries mass) must contain no negative cycle. Returns the most
/// negative cycle weight found by Floyd-Warshall (>= -tol means optimal).
inline double most_negative_residual_cycle(const Matrix& plan, const Matrix& cost, double mass_tol = 1e-13) {
  const auto m = plan.rows();
  const auto n = plan.cols();
  const auto N = m + n;
  const double inf = std::numeric_limits<double>::infinity();
  Matrix D = Matrix::Constant(N, N, inf);
  for (Eigen::Index v = 0; v < N; ++v) D(v, v) = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      D(i, m + j) = std::min(D(i, m + j), cost(i, j));
      if (plan(i, j) > mass_tol) D(m + j, i) = std::min(D(m + j, i), -cost(i, j));
    }
  }
  for (Eigen::Index k = 0; k < N; ++k)
    for (Eigen::Index a = 0; a < N; ++a) {
      if (D(a, k) == inf) continue;
      for (Eigen::Index b = 0; b < N; ++b)
        if (D(k, b) < inf && D(a, k) + D(k, b) < D(a, b)) D(a, b) = D(a, k) + D(k, b);
    }
  double worst = 0.0;
  for (Eigen::Index v = 0; v < N; ++v) worst = std::min(worst, D(v, v));
  return worst;
}

/// min over `samples` points of the sphere of radius r around c of <p, v>.
inline double sphere_sampled_min(const Vector& p, const Vector& c, double r, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vector u(p.size());
    for (Eigen::Index k = 0; k < u.size(); ++k) u(k) = g(rng);
    const double nu = u.norm();
    if (nu == 0.0) continue;
    best = std::min(best, p.dot(c + r * u / nu));
  }
  return best;
}

inline Matrix random_points(std::mt19937_64& rng, Eigen::Index n, Eigen::Index d, double half_width) {
  std::uniform_real_distribution<double> u(-half_width, half_width);
  Matrix X(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index k = 0; k < d; ++k) X(i, k) = u(rng);
  return X;
}

inline Vector random_weights(std::mt19937_64& rng, Eigen::Index n) {
  std::uniform_real_distribution<double> u(0.1, 1.0);
  Vector w(n);
  for (Eigen::Index i = 0; i < n; ++i) w(i) = u(rng);
  return w / w.sum();
}

}  // namespace oracle
