#include "wreach/hamiltonian.hpp"

#include <cmath>

#include "wreach/errors.hpp"

namespace wreach {

namespace {

void require_attached(const DiscreteMeasure& nu, const Displacement& p) {
  if (p.base.size() != nu.size() || p.base.dim() != nu.dim() ||
      static_cast<std::size_t>(p.vectors.rows()) != nu.size() || p.vectors.cols() != nu.dim()) {
    throw DimensionError("displacement is not attached to the measure support");
  }
  if (!(p.base.points() - nu.points()).isZero(1e-12 * (1.0 + nu.points().cwiseAbs().maxCoeff()))) {
    throw DimensionError("displacement base points differ from the measure support");
  }
}

}  // namespace

HamiltonianValue hamiltonian(const FieldSpec& F, const DiscreteMeasure& nu, const Displacement& p) {
  require_attached(nu, p);
  const std::vector<BallSet> images = field_eval_all(F, nu);
  HamiltonianValue out;
  out.per_point.reserve(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) {
    const double inf = images[i].min_inner(p.at(i));
    out.per_point.push_back(inf);
    out.value += nu.weight(i) * inf;
  }
  return out;
}

Vector argmin_selection(const FieldSpec& F, const Vector& x, const DiscreteMeasure& nu, const Vector& p_x) {
  if (p_x.size() != x.size()) throw DimensionError("argmin_selection: p and x dimensions differ");
  return field_eval(F, x, nu).argmin_inner(p_x);
}

HokResult hok_residual(const FieldSpec& F, const DiscreteMeasure& nu1, const DiscreteMeasure& nu2,
                       double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("hok_residual: lambda must be positive");
  DisplacementPair pq = displacement_pq(nu1, nu2);
  pq.p.vectors *= lambda;
  pq.q.vectors *= -lambda;
  const double h1 = hamiltonian(F, nu1, pq.p).value;
  const double h2 = hamiltonian(F, nu2, pq.q).value;
  const double dist = std::sqrt(pq.cost);
  return HokResult{std::abs(h1 - h2), 2.0 * F.lipschitz_L() * lambda * dist * dist, dist};
}

}  // namespace wreach
