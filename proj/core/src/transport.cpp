#include "wreach/transport.hpp"

#include <cmath>

#include "wreach/errors.hpp"

namespace wreach {

namespace {

void require_same_dim(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("measures live in different dimensions (" + std::to_string(a.dim()) +
                         " vs " + std::to_string(b.dim()) + ")");
  }
}

}  // namespace

double Displacement::l2_norm() const {
  const Vector sq = vectors.rowwise().squaredNorm();
  return std::sqrt(base.weights().dot(sq));
}

Matrix squared_distances(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  require_same_dim(a, b);
  Matrix c(a.points().rows(), b.points().rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index j = 0; j < c.cols(); ++j) {
      c(i, j) = (a.points().row(i) - b.points().row(j)).squaredNorm();
    }
  }
  return c;
}

double coupling_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const Matrix& plan) {
  return plan.cwiseProduct(squared_distances(a, b)).sum();
}

TransportPlan solve_ot(const DiscreteMeasure& a, const DiscreteMeasure& b, OtMethod method) {
  require_same_dim(a, b);
  const Matrix c = squared_distances(a, b);
  const bool assignment_ok = a.size() == b.size() && a.is_uniform() && b.is_uniform();
  if (method == OtMethod::Assignment && !assignment_ok) {
    throw ParameterError("assignment solver needs equal-size uniform clouds");
  }
  if (method == OtMethod::Auto) {
    method = assignment_ok ? OtMethod::Assignment : OtMethod::NetworkSimplex;
  }

  Matrix plan;
  if (method == OtMethod::Assignment) {
    const std::vector<int> perm = detail::hungarian(c);
    plan = Matrix::Zero(c.rows(), c.cols());
    for (std::size_t i = 0; i < perm.size(); ++i) {
      plan(static_cast<Eigen::Index>(i), perm[i]) = a.weight(i);
    }
  } else {
    plan = detail::transportation_simplex(a.weights(), b.weights(), c);
  }
  const double cost = plan.cwiseProduct(c).sum();
  return TransportPlan{a, b, std::move(plan), std::max(0.0, cost), true};
}

double w2(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  return std::sqrt(solve_ot(a, b).cost);
}

TransportPlan invert_plan(const TransportPlan& plan) {
  return TransportPlan{plan.target, plan.source, plan.matrix.transpose(), plan.cost, plan.optimal};
}

Matrix row_barycenters(const TransportPlan& plan) {
  Matrix bary = plan.source.points();
  for (std::size_t i = 0; i < plan.source.size(); ++i) {
    const double w = plan.source.weight(i);
    if (w <= 0.0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    bary.row(row) = (plan.matrix.row(row) * plan.target.points()) / w;
  }
  return bary;
}

bool is_induced_by_map(const TransportPlan& plan, double tol) {
  for (Eigen::Index i = 0; i < plan.matrix.rows(); ++i) {
    if (plan.source.weights()(i) <= 0.0) continue;
    int nonzero = 0;
    for (Eigen::Index j = 0; j < plan.matrix.cols(); ++j) {
      if (plan.matrix(i, j) > tol) ++nonzero;
    }
    if (nonzero != 1) return false;
  }
  return true;
}

DisplacementPair displacement_pq(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  const TransportPlan plan = solve_ot(a, b);
  const TransportPlan inverse = invert_plan(plan);

  bool skipped = false;
  auto barycentric = [&skipped](const TransportPlan& pl) {
    Matrix v = pl.source.points() - row_barycenters(pl);
    for (std::size_t i = 0; i < pl.source.size(); ++i) {
      if (pl.source.weight(i) <= 0.0) {
        v.row(static_cast<Eigen::Index>(i)).setZero();
        skipped = true;
      }
    }
    return v;
  };

  Displacement p{a, barycentric(plan)};
  Displacement q{b, barycentric(inverse)};
  return DisplacementPair{std::move(p), std::move(q), skipped, plan.cost};
}

OptimalDisplacement optimal_displacement(const DiscreteMeasure& nu, const DiscreteMeasure& xi,
                                         double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("optimal_displacement: lambda must be positive");
  const TransportPlan plan = solve_ot(nu, xi);
  Matrix v = lambda * (row_barycenters(plan) - nu.points());
  return OptimalDisplacement{Displacement{nu, std::move(v)}, is_induced_by_map(plan)};
}

}  // namespace wreach
