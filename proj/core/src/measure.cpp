#include "wreach/measure.hpp"

#include <cmath>

#include "wreach/errors.hpp"

namespace wreach {

DiscreteMeasure DiscreteMeasure::make(Matrix points, Vector weights) {
  if (points.rows() == 0 || points.cols() == 0) {
    throw ConstructionError("empty support");
  }
  if (points.rows() != weights.size()) {
    throw ConstructionError("points and weights have different lengths");
  }
  if (!points.allFinite()) {
    throw ConstructionError("non-finite coordinate");
  }
  double total = 0.0;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    const double w = weights(i);
    if (!std::isfinite(w)) throw ConstructionError("non-finite weight");
    if (w < 0.0) throw ConstructionError("negative weight");
    total += w;
  }
  if (!(total > 0.0)) {
    throw ConstructionError("zero total mass");
  }
  weights /= total;
  return DiscreteMeasure(std::move(points), std::move(weights));
}

DiscreteMeasure DiscreteMeasure::uniform(Matrix points) {
  const Eigen::Index n = points.rows();
  return make(std::move(points), Vector::Ones(n));
}

DiscreteMeasure DiscreteMeasure::dirac(const Vector& x) {
  Matrix p(1, x.size());
  p.row(0) = x.transpose();
  return make(std::move(p), Vector::Ones(1));
}

DiscreteMeasure DiscreteMeasure::with_points(Matrix points) const {
  if (points.rows() != points_.rows()) {
    throw ConstructionError("with_points: atom count changed");
  }
  if (!points.allFinite()) {
    throw ConstructionError("non-finite coordinate");
  }
  return DiscreteMeasure(std::move(points), weights_);
}

Vector DiscreteMeasure::mean() const {
  return points_.transpose() * weights_;
}

bool DiscreteMeasure::is_uniform(double tol) const {
  const double expected = 1.0 / static_cast<double>(size());
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    if (std::abs(weights_(i) - expected) > tol * expected) return false;
  }
  return true;
}

DiscreteMeasure make_measure(Matrix points, Vector weights) {
  return DiscreteMeasure::make(std::move(points), std::move(weights));
}

MomentValue moment2(const DiscreteMeasure& nu) {
  const Vector sq = nu.points().rowwise().squaredNorm();
  return {std::sqrt(nu.weights().dot(sq)), 2.0};
}

MomentValue moment2eps(const DiscreteMeasure& nu, double eps) {
  if (!(eps > 0.0)) {
    throw ParameterError("moment2eps: eps must be positive");
  }
  const double order = 2.0 + eps;
  double acc = 0.0;
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double r = nu.points().row(static_cast<Eigen::Index>(i)).norm();
    if (r > 0.0) acc += nu.weight(i) * std::pow(r, order);
  }
  return {std::pow(acc, 1.0 / order), order};
}

DiscreteMeasure push_forward(const DiscreteMeasure& nu, const PointMap& map) {
  Matrix out(nu.points().rows(), nu.points().cols());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const Vector y = map(nu.point(i));
    if (y.size() != nu.dim()) {
      // Maps may change dimension; rebuild the buffer on first mismatch.
      if (i == 0) {
        out.resize(nu.points().rows(), y.size());
      } else if (y.size() != out.cols()) {
        throw ConstructionError("push_forward: inconsistent image dimension");
      }
    }
    if (!y.allFinite()) {
      throw ConstructionError("push_forward: non-finite image");
    }
    out.row(static_cast<Eigen::Index>(i)) = y.transpose();
  }
  return DiscreteMeasure(std::move(out), nu.weights());
}

}  // namespace wreach
