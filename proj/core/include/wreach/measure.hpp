#pragma once

#include <functional>

#include <Eigen/Dense>

namespace wreach {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Weighted point cloud on R^d with weights summing to one.
///
/// Support points are the rows of `points()`. Duplicate points are kept as
/// separate atoms so that particle flows never change the atom count.
class DiscreteMeasure {
 public:
  /// Builds a measure from rows of `points`, renormalizing `weights`.
  /// Throws ConstructionError on empty support, negative or non-finite
  /// weights, zero total mass, or non-finite coordinates.
  static DiscreteMeasure make(Matrix points, Vector weights);

  static DiscreteMeasure uniform(Matrix points);
  static DiscreteMeasure dirac(const Vector& x);

  /// Same weights, new support. Used for particle flows where the weights
  /// are already normalized and must stay bit-identical.
  DiscreteMeasure with_points(Matrix points) const;

  std::size_t size() const { return static_cast<std::size_t>(points_.rows()); }
  int dim() const { return static_cast<int>(points_.cols()); }

  const Matrix& points() const { return points_; }
  const Vector& weights() const { return weights_; }
  Vector point(std::size_t i) const { return points_.row(static_cast<Eigen::Index>(i)).transpose(); }
  double weight(std::size_t i) const { return weights_(static_cast<Eigen::Index>(i)); }

  Vector mean() const;

  /// True when every weight equals 1/n up to `tol` (relative).
  bool is_uniform(double tol = 1e-12) const;

 private:
  friend DiscreteMeasure push_forward(const DiscreteMeasure& nu, const std::function<Vector(const Vector&)>& map);

  DiscreteMeasure(Matrix points, Vector weights)
      : points_(std::move(points)), weights_(std::move(weights)) {}

  Matrix points_;
  Vector weights_;
};

struct MomentValue {
  double value = 0.0;
  double order = 2.0;
};

DiscreteMeasure make_measure(Matrix points, Vector weights);

/// (sum_i w_i |x_i|^2)^{1/2}
MomentValue moment2(const DiscreteMeasure& nu);

/// (sum_i w_i |x_i|^{2+eps})^{1/(2+eps)}; eps must be positive.
MomentValue moment2eps(const DiscreteMeasure& nu, double eps);

using PointMap = std::function<Vector(const Vector&)>;

/// Image measure under `map`. Weights are unchanged and coincident images
/// are not merged. Throws ConstructionError on a non-finite image.
DiscreteMeasure push_forward(const DiscreteMeasure& nu, const PointMap& map);

}  // namespace wreach
