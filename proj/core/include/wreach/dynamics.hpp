#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wreach/measure.hpp"
#include "wreach/transport.hpp"

namespace wreach {

/// F(x, nu) = closed ball B(0, alpha (|x| + m2(nu))).
struct BallField {
  double alpha = 1.0;
};

/// Single-valued F(x, mu) = A x + B mean(mu).
struct LinearField {
  Matrix A;
  Matrix B;
  double k = 1.0;  // <Bz, z> <= -k |z|^2
};

/// F(x, nu) = closed ball B(center(x, nu), radius(x, nu)).
struct GenericBall {
  std::string name = "generic_ball";
  std::function<Vector(const Vector&, const DiscreteMeasure&)> center;
  std::function<double(const Vector&, const DiscreteMeasure&)> radius;
};

/// Convex compact image of the set-valued field: a ball or a singleton.
struct BallSet {
  Vector center;
  double radius = 0.0;

  bool is_singleton() const { return radius == 0.0; }
  double distance(const Vector& v) const;
  Vector project(const Vector& v) const;
  /// Minimizer of <p, v> over the ball; the center when p = 0.
  Vector argmin_inner(const Vector& p) const;
  /// min over the ball of <p, v> = <p, c> - r |p|.
  double min_inner(const Vector& p) const;
};

class FieldSpec {
 public:
  using Variant = std::variant<BallField, LinearField, GenericBall>;

  static FieldSpec ball(double alpha);
  /// Validates <Bz, z> <= -k|z|^2 on 200 seeded random directions.
  /// L = max(|A|_2, |B|_2), K_F = 0.
  static FieldSpec linear(Matrix A, Matrix B, double k, std::uint64_t check_seed = 0x5eed);
  static FieldSpec generic_ball(GenericBall field, double lipschitz_L, double k_F);

  const Variant& variant() const { return variant_; }
  double lipschitz_L() const { return lipschitz_L_; }
  double k_F() const { return k_F_; }
  /// C = max{L, K_F} of the linear growth bound.
  double growth_constant() const { return std::max(lipschitz_L_, k_F_); }
  std::string name() const;

 private:
  FieldSpec(Variant v, double L, double kF) : variant_(std::move(v)), lipschitz_L_(L), k_F_(kF) {}

  Variant variant_;
  double lipschitz_L_;
  double k_F_;
};

BallSet field_eval(const FieldSpec& F, const Vector& x, const DiscreteMeasure& nu);

/// Images F(x_i, nu) for every atom; measure functionals are computed once.
std::vector<BallSet> field_eval_all(const FieldSpec& F, const DiscreteMeasure& nu);

/// Diagnostic: largest observed ratio Hausdorff(F(x,nu), F(x',nu')) /
/// (|x - x'| + W2(nu, nu')) over random pairs of small clouds in dimension `dim`.
double empirical_lipschitz(const FieldSpec& F, int dim, std::size_t pairs, std::uint64_t seed);

struct Proposal {
  Matrix velocities;  // one row per particle, may lie outside the image
  bool fallback = false;
};

/// Named velocity selection strategy. Proposals are projected onto the
/// field images by the integrator, so any proposal yields an admissible step.
class Selection {
 public:
  using Proposer = std::function<Proposal(const FieldSpec& F, double t, const DiscreteMeasure& mu,
                                          const std::vector<BallSet>& images)>;
  using ProposerFactory = std::function<Proposer()>;
  using PSource = std::function<std::optional<Displacement>(const DiscreteMeasure&)>;

  /// Closed-form v(t, x).
  static Selection analytic(std::string name, std::function<Vector(double, const Vector&)> v);
  /// v(x) = -rate * x
  static Selection linear_decay(double rate);
  /// Argmin of <p(x), v> over F(x, mu) with p supplied per step. When the
  /// source returns nothing, the previous valid p is reused.
  static Selection greedy(PSource p_source, std::string name = "greedy");
  /// Ball point minimizing <x, v>.
  static Selection max_contraction();
  /// Ball point maximizing <x, v>.
  static Selection max_expansion();
  static Selection custom(std::string name, ProposerFactory factory);

  const std::string& name() const { return name_; }
  /// Fresh proposer; stateful strategies start from a clean state.
  Proposer start() const { return factory_(); }

 private:
  Selection(std::string name, ProposerFactory f) : name_(std::move(name)), factory_(std::move(f)) {}

  std::string name_;
  ProposerFactory factory_;
};

struct StepDiagnostics {
  double residual = 0.0;   // max_i dist(v_i, F(x_i, mu))
  double max_speed = 0.0;  // max_i |v_i|
  bool fallback = false;   // greedy reused a previous p
  std::size_t projected = 0;  // proposals moved onto the image
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<DiscreteMeasure> measures;  // one per node
  std::vector<Displacement> velocities;   // one per interval
  std::string selection_name;
  std::vector<StepDiagnostics> diagnostics;  // one per interval

  const DiscreteMeasure& initial() const { return measures.front(); }
  const DiscreteMeasure& terminal() const { return measures.back(); }
  std::size_t steps() const { return velocities.size(); }
};

/// Number of uniform steps used for a horizon: max(1, round(T/dt)).
std::size_t step_count(double dt, double T);

/// Explicit Euler particle flow x^{n+1} = x^n + h v^n on the uniform grid
/// t0 + n h, h = T / step_count(dt, T), with v^n_i the projection of the
/// proposal onto F(x^n_i, mu^n). Throws IntegrationError on blow-up.
TrajectoryRecord integrate(const FieldSpec& F, const DiscreteMeasure& mu0, const Selection& selection,
                           double dt, double T, double t0 = 0.0);

/// Same arithmetic as integrate() but keeps only the final measure.
DiscreteMeasure rollout(const FieldSpec& F, const DiscreteMeasure& mu0, const Selection& selection,
                        double dt, double T, double t0 = 0.0);

struct AdmissibilityReport {
  std::vector<double> residuals;  // per step
  double max_residual = 0.0;
  double max_speed = 0.0;
  /// max over steps and particles of |v| - C(1 + m2)(1 + |x|); <= 0 when the
  /// growth bound holds.
  double max_growth_excess = 0.0;
  bool growth_ok = true;
  bool pass = true;
};

AdmissibilityReport check_admissible(const FieldSpec& F, const TrajectoryRecord& traj, double tol);

struct AprioriBounds {
  double C_ab = 0.0;  // e^{L(b-a)} (m2 + K_F (b-a))
  double D_ab = 0.0;  // squared sup-speed bound
  double M = 0.0;     // moment bound e^{L(b-a) e^{L(b-a)}} C_ab
};

AprioriBounds apriori_bounds(const FieldSpec& F, const DiscreteMeasure& mu_bar, double a, double b);

}  // namespace wreach
