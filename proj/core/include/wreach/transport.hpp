#pragma once

#include <vector>

#include "wreach/measure.hpp"

namespace wreach {

/// Discrete coupling between `source` (rows) and `target` (columns).
struct TransportPlan {
  DiscreteMeasure source;
  DiscreteMeasure target;
  Matrix matrix;      // matrix(i, j) = mass moved from source atom i to target atom j
  double cost = 0.0;  // sum_ij matrix(i, j) |x_i - y_j|^2
  bool optimal = false;
};

/// A vector attached to every atom of `base`.
struct Displacement {
  DiscreteMeasure base;
  Matrix vectors;  // one row per atom of base

  /// (sum_i w_i |p(x_i)|^2)^{1/2}
  double l2_norm() const;
  Vector at(std::size_t i) const { return vectors.row(static_cast<Eigen::Index>(i)).transpose(); }
};

enum class OtMethod {
  Auto,            // assignment for equal-size uniform clouds, network simplex otherwise
  NetworkSimplex,  // transportation simplex on the bipartite network
  Assignment,      // Hungarian; requires equal-size uniform clouds
};

/// Matrix of |x_i - y_j|^2.
Matrix squared_distances(const DiscreteMeasure& a, const DiscreteMeasure& b);

double coupling_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const Matrix& plan);

/// Exact optimal plan for the squared Euclidean cost (a vertex of the
/// transport polytope). Deterministic for a given input.
TransportPlan solve_ot(const DiscreteMeasure& a, const DiscreteMeasure& b,
                       OtMethod method = OtMethod::Auto);

double w2(const DiscreteMeasure& a, const DiscreteMeasure& b);

/// Swaps source and target; the matrix is transposed.
TransportPlan invert_plan(const TransportPlan& plan);

/// Row barycenters sum_j plan(i,j) y_j / w_i. Zero-weight rows yield x_i.
Matrix row_barycenters(const TransportPlan& plan);

/// True when every positive-weight row of the plan has a single nonzero entry.
bool is_induced_by_map(const TransportPlan& plan, double tol = 1e-14);

struct DisplacementPair {
  Displacement p;  // over a: x - barycenter of its row
  Displacement q;  // over b: y - barycenter of its column
  bool skipped_zero_weight = false;
  double cost = 0.0;  // W2^2 of the plan used
};

/// Barycentric displacements p_{a,b}, q_{a,b} computed from one optimal plan.
DisplacementPair displacement_pq(const DiscreteMeasure& a, const DiscreteMeasure& b);

struct OptimalDisplacement {
  Displacement p;
  bool is_map = false;
};

/// lambda * (barycentric projection of the optimal plan from nu to xi - id).
OptimalDisplacement optimal_displacement(const DiscreteMeasure& nu, const DiscreteMeasure& xi,
                                         double lambda);

namespace detail {

/// Min-cost transportation problem with supplies `a`, demands `b` and
/// costs `c` (a.size() x b.size()). Returns the flow matrix of an optimal
/// basic solution. Throws Error if the pivot limit is reached.
Matrix transportation_simplex(const Vector& a, const Vector& b, const Matrix& c);

/// Square assignment problem; returns column assigned to each row.
std::vector<int> hungarian(const Matrix& cost);

}  // namespace detail

}  // namespace wreach
