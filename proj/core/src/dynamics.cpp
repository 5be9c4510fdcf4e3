#include "wreach/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>
#include <sstream>

#include "wreach/errors.hpp"

namespace wreach {

// ---------------------------------------------------------------- BallSet

double BallSet::distance(const Vector& v) const {
  return std::max(0.0, (v - center).norm() - radius);
}

Vector BallSet::project(const Vector& v) const {
  const Vector offset = v - center;
  const double len = offset.norm();
  if (len <= radius) return v;
  return center + (radius / len) * offset;
}

Vector BallSet::argmin_inner(const Vector& p) const {
  const double len = p.norm();
  if (len == 0.0 || radius == 0.0) return center;
  return center - (radius / len) * p;
}

double BallSet::min_inner(const Vector& p) const {
  return p.dot(center) - radius * p.norm();
}

// -------------------------------------------------------------- FieldSpec

FieldSpec FieldSpec::ball(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw ParameterError("ball field: alpha must be positive");
  }
  return FieldSpec(BallField{alpha}, alpha, 0.0);
}

FieldSpec FieldSpec::linear(Matrix A, Matrix B, double k, std::uint64_t check_seed) {
  if (A.rows() != A.cols() || B.rows() != B.cols() || A.rows() != B.rows() || A.rows() == 0) {
    throw DimensionError("linear field: A and B must be square of equal size");
  }
  if (!(k > 0.0)) throw ParameterError("linear field: k must be positive");

  std::mt19937_64 rng(check_seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int draw = 0; draw < 200; ++draw) {
    Vector z(A.rows());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = gauss(rng);
    const double lhs = z.dot(B * z);
    if (lhs > -k * z.squaredNorm() + 1e-12) {
      throw ConstructionError("linear field: <Bz, z> <= -k|z|^2 violated on a sample direction");
    }
  }

  Eigen::JacobiSVD<Matrix> svd_a(A);
  Eigen::JacobiSVD<Matrix> svd_b(B);
  const double L = std::max(svd_a.singularValues()(0), svd_b.singularValues()(0));
  return FieldSpec(LinearField{std::move(A), std::move(B), k}, L, 0.0);
}

FieldSpec FieldSpec::generic_ball(GenericBall field, double lipschitz_L, double k_F) {
  if (!field.center || !field.radius) {
    throw ConstructionError("generic ball field needs center and radius functions");
  }
  if (lipschitz_L < 0.0 || k_F < 0.0) {
    throw ParameterError("generic ball field: constants must be nonnegative");
  }
  return FieldSpec(std::move(field), lipschitz_L, k_F);
}

std::string FieldSpec::name() const {
  std::ostringstream os;
  std::visit(
      [&os](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BallField>) {
          os << "ball(alpha=" << f.alpha << ")";
        } else if constexpr (std::is_same_v<T, LinearField>) {
          os << "linear(k=" << f.k << ")";
        } else {
          os << f.name;
        }
      },
      variant_);
  return os.str();
}

// ------------------------------------------------------------- evaluation

namespace {

BallSet eval_with(const FieldSpec& F, const Vector& x, const DiscreteMeasure& nu, double m2,
                  const Vector& mean) {
  return std::visit(
      [&](const auto& f) -> BallSet {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BallField>) {
          return {Vector::Zero(x.size()), f.alpha * (x.norm() + m2)};
        } else if constexpr (std::is_same_v<T, LinearField>) {
          if (x.size() != f.A.rows()) throw DimensionError("linear field: state dimension mismatch");
          return {f.A * x + f.B * mean, 0.0};
        } else {
          const double r = f.radius(x, nu);
          if (!(r >= 0.0)) throw Error("generic ball field: negative or NaN radius");
          return {f.center(x, nu), r};
        }
      },
      F.variant());
}

}  // namespace

BallSet field_eval(const FieldSpec& F, const Vector& x, const DiscreteMeasure& nu) {
  if (x.size() != nu.dim()) throw DimensionError("field_eval: point and measure dimensions differ");
  return eval_with(F, x, nu, moment2(nu).value, nu.mean());
}

std::vector<BallSet> field_eval_all(const FieldSpec& F, const DiscreteMeasure& nu) {
  const double m2 = moment2(nu).value;
  const Vector mean = nu.mean();
  std::vector<BallSet> out;
  out.reserve(nu.size());
  for (std::size_t i = 0; i < nu.size(); ++i) out.push_back(eval_with(F, nu.point(i), nu, m2, mean));
  return out;
}

double empirical_lipschitz(const FieldSpec& F, int dim, std::size_t pairs, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::uniform_int_distribution<int> count(1, 4);
  auto cloud = [&]() {
    Matrix pts(count(rng), dim);
    for (Eigen::Index i = 0; i < pts.rows(); ++i)
      for (Eigen::Index j = 0; j < dim; ++j) pts(i, j) = coord(rng);
    return DiscreteMeasure::uniform(std::move(pts));
  };
  auto point = [&]() {
    Vector x(dim);
    for (Eigen::Index j = 0; j < dim; ++j) x(j) = coord(rng);
    return x;
  };

  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const DiscreteMeasure nu1 = cloud();
    const DiscreteMeasure nu2 = cloud();
    const Vector x1 = point();
    const Vector x2 = point();
    const BallSet b1 = field_eval(F, x1, nu1);
    const BallSet b2 = field_eval(F, x2, nu2);
    const double hausdorff = (b1.center - b2.center).norm() + std::abs(b1.radius - b2.radius);
    const double d = (x1 - x2).norm() + w2(nu1, nu2);
    if (d > 1e-12) worst = std::max(worst, hausdorff / d);
  }
  return worst;
}

// -------------------------------------------------------------- selection

Selection Selection::analytic(std::string name, std::function<Vector(double, const Vector&)> v) {
  return Selection("analytic:" + name, [v]() -> Proposer {
    return [v](const FieldSpec&, double t, const DiscreteMeasure& mu, const std::vector<BallSet>&) {
      Matrix out(mu.points().rows(), mu.points().cols());
      for (std::size_t i = 0; i < mu.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = v(t, mu.point(i)).transpose();
      return Proposal{std::move(out), false};
    };
  });
}

Selection Selection::linear_decay(double rate) {
  std::ostringstream os;
  os << "-" << rate << "*x";
  return analytic(os.str(), [rate](double, const Vector& x) -> Vector { return -rate * x; });
}

namespace {

Proposal argmin_rows(const Matrix& p, const std::vector<BallSet>& images, bool fallback) {
  Matrix out(p.rows(), p.cols());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    out.row(i) = images[static_cast<std::size_t>(i)].argmin_inner(p.row(i).transpose()).transpose();
  }
  return Proposal{std::move(out), fallback};
}

}  // namespace

Selection Selection::greedy(PSource p_source, std::string name) {
  return Selection(std::move(name), [p_source]() -> Proposer {
    auto last = std::make_shared<std::optional<Matrix>>();
    return [p_source, last](const FieldSpec&, double, const DiscreteMeasure& mu,
                            const std::vector<BallSet>& images) {
      std::optional<Displacement> p = p_source(mu);
      const bool usable = p && static_cast<std::size_t>(p->vectors.rows()) == mu.size() &&
                          p->vectors.cols() == mu.dim();
      if (usable) {
        *last = p->vectors;
        return argmin_rows(p->vectors, images, false);
      }
      if (last->has_value() && static_cast<std::size_t>((*last)->rows()) == mu.size()) {
        return argmin_rows(**last, images, true);
      }
      return argmin_rows(Matrix::Zero(mu.points().rows(), mu.points().cols()), images, true);
    };
  });
}

Selection Selection::max_contraction() {
  return Selection("max-contraction", []() -> Proposer {
    return [](const FieldSpec&, double, const DiscreteMeasure& mu, const std::vector<BallSet>& images) {
      return argmin_rows(mu.points(), images, false);
    };
  });
}

Selection Selection::max_expansion() {
  return Selection("max-expansion", []() -> Proposer {
    return [](const FieldSpec&, double, const DiscreteMeasure& mu, const std::vector<BallSet>& images) {
      return argmin_rows(-mu.points(), images, false);
    };
  });
}

Selection Selection::custom(std::string name, ProposerFactory factory) {
  if (!factory) throw ConstructionError("custom selection needs a proposer factory");
  return Selection(std::move(name), std::move(factory));
}

// ------------------------------------------------------------ integration

std::size_t step_count(double dt, double T) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive");
  if (!(T > 0.0) || !std::isfinite(T)) throw ParameterError("horizon T must be positive");
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(T / dt)));
}

namespace {

struct Step {
  Matrix velocities;
  StepDiagnostics diag;
};

Step admissible_step(const FieldSpec& F, const Selection::Proposer& proposer, double t,
                     const DiscreteMeasure& mu, std::size_t index) {
  const std::vector<BallSet> images = field_eval_all(F, mu);
  Proposal prop = proposer(F, t, mu, images);
  if (static_cast<std::size_t>(prop.velocities.rows()) != mu.size() ||
      prop.velocities.cols() != mu.dim()) {
    throw DimensionError("selection returned a proposal of the wrong shape");
  }
  if (!prop.velocities.allFinite()) throw IntegrationError("non-finite velocity proposal", index);

  Step step{Matrix(mu.points().rows(), mu.points().cols()), {}};
  step.diag.fallback = prop.fallback;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    const Vector proposal = prop.velocities.row(row).transpose();
    const BallSet& image = images[i];
    Vector v = proposal;
    if (image.distance(proposal) > 0.0) {
      v = image.project(proposal);
      ++step.diag.projected;
    }
    step.velocities.row(row) = v.transpose();
    step.diag.residual = std::max(step.diag.residual, image.distance(v));
    step.diag.max_speed = std::max(step.diag.max_speed, v.norm());
  }
  return step;
}

template <class OnStep>
DiscreteMeasure run_flow(const FieldSpec& F, const DiscreteMeasure& mu0, const Selection& selection,
                         double dt, double T, double t0, OnStep&& on_step) {
  const std::size_t n = step_count(dt, T);
  const double h = T / static_cast<double>(n);
  const Selection::Proposer proposer = selection.start();
  DiscreteMeasure mu = mu0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = t0 + static_cast<double>(k) * h;
    Step step = admissible_step(F, proposer, t, mu, k);
    Matrix next = mu.points() + h * step.velocities;
    if (!next.allFinite()) throw IntegrationError("non-finite state", k);
    DiscreteMeasure mu_next = mu.with_points(std::move(next));
    on_step(k, t0 + static_cast<double>(k + 1) * h, mu, std::move(step), mu_next);
    mu = std::move(mu_next);
  }
  return mu;
}

}  // namespace

TrajectoryRecord integrate(const FieldSpec& F, const DiscreteMeasure& mu0, const Selection& selection,
                           double dt, double T, double t0) {
  TrajectoryRecord rec;
  rec.selection_name = selection.name();
  const std::size_t n = step_count(dt, T);
  rec.times.reserve(n + 1);
  rec.measures.reserve(n + 1);
  rec.velocities.reserve(n);
  rec.diagnostics.reserve(n);
  rec.times.push_back(t0);
  rec.measures.push_back(mu0);
  run_flow(F, mu0, selection, dt, T, t0,
           [&rec](std::size_t, double t_next, const DiscreteMeasure& mu, Step&& step,
                  const DiscreteMeasure& mu_next) {
             rec.velocities.push_back(Displacement{mu, std::move(step.velocities)});
             rec.diagnostics.push_back(step.diag);
             rec.times.push_back(t_next);
             rec.measures.push_back(mu_next);
           });
  return rec;
}

DiscreteMeasure rollout(const FieldSpec& F, const DiscreteMeasure& mu0, const Selection& selection,
                        double dt, double T, double t0) {
  return run_flow(F, mu0, selection, dt, T, t0,
                  [](std::size_t, double, const DiscreteMeasure&, Step&&, const DiscreteMeasure&) {});
}

// ------------------------------------------------------------- auditing

AdmissibilityReport check_admissible(const FieldSpec& F, const TrajectoryRecord& traj, double tol) {
  if (traj.measures.size() != traj.velocities.size() + 1) {
    throw ConstructionError("trajectory record: node/interval count mismatch");
  }
  AdmissibilityReport rep;
  rep.max_growth_excess = -std::numeric_limits<double>::infinity();
  const double C = F.growth_constant();
  for (std::size_t k = 0; k < traj.velocities.size(); ++k) {
    const DiscreteMeasure& mu = traj.measures[k];
    const Matrix& v = traj.velocities[k].vectors;
    const std::vector<BallSet> images = field_eval_all(F, mu);
    const double m2 = moment2(mu).value;
    double worst = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Vector vi = v.row(static_cast<Eigen::Index>(i)).transpose();
      worst = std::max(worst, images[i].distance(vi));
      const double speed = vi.norm();
      rep.max_speed = std::max(rep.max_speed, speed);
      const double bound = C * (1.0 + m2) * (1.0 + mu.point(i).norm());
      rep.max_growth_excess = std::max(rep.max_growth_excess, speed - bound);
    }
    rep.residuals.push_back(worst);
    rep.max_residual = std::max(rep.max_residual, worst);
  }
  if (traj.velocities.empty()) rep.max_growth_excess = 0.0;
  rep.growth_ok = rep.max_growth_excess <= tol;
  rep.pass = rep.max_residual <= tol;
  return rep;
}

AprioriBounds apriori_bounds(const FieldSpec& F, const DiscreteMeasure& mu_bar, double a, double b) {
  if (!(b > a) || a < 0.0) throw ParameterError("apriori_bounds: need 0 <= a < b");
  const double L = F.lipschitz_L();
  const double K = F.k_F();
  const double h = b - a;
  const double eL = std::exp(L * h);
  AprioriBounds out;
  out.C_ab = eL * (moment2(mu_bar).value + K * h);
  out.M = std::exp(L * h * eL) * out.C_ab;
  const double inner = out.M + out.C_ab + L * h * out.M;
  out.D_ab = (K + L * inner) * (K + L * inner);
  return out;
}

}  // namespace wreach
