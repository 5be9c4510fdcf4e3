#pragma once

#include <vector>

#include "wreach/dynamics.hpp"

namespace wreach {

struct HamiltonianValue {
  double value = 0.0;
  std::vector<double> per_point;  // inf over F(x_i, nu) of <p(x_i), v>
};

/// H_F(nu, p) = sum_i w_i inf_{v in F(x_i, nu)} <p(x_i), v>, closed form for
/// ball and singleton images. Throws DimensionError when p is not attached
/// to the support of nu.
HamiltonianValue hamiltonian(const FieldSpec& F, const DiscreteMeasure& nu, const Displacement& p);

/// A point of F(x, nu) realizing the infimum of <p_x, v>.
Vector argmin_selection(const FieldSpec& F, const Vector& x, const DiscreteMeasure& nu, const Vector& p_x);

struct HokResult {
  double residual = 0.0;
  double bound = 0.0;  // 2 L lambda W2^2
  double w2 = 0.0;
};

/// Modulus check |H(nu1, lambda p) - H(nu2, -lambda q)| against 2 L lambda W2^2,
/// with p, q the barycentric displacements of displacement_pq(nu1, nu2).
///
/// q points from the column barycenter to y, so -q is the displacement seen
/// from nu2 when the doubled test function lambda/2 W2^2(nu1, nu2) is
/// differentiated in its second argument.
HokResult hok_residual(const FieldSpec& F, const DiscreteMeasure& nu1, const DiscreteMeasure& nu2,
                       double lambda);

}  // namespace wreach
