#include "wreach/mayer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <random>

#include "wreach/errors.hpp"

namespace wreach {

MayerProblem MayerProblem::from(double t, DiscreteMeasure nu) const {
  MayerProblem p = *this;
  p.t_start = t;
  p.initial = std::move(nu);
  return p;
}

namespace {

using Controls = std::vector<Matrix>;

struct Horizon {
  double length = 0.0;
  double dt = 0.0;
  std::size_t steps = 0;
  std::size_t grid = 0;
  double h = 0.0;
};

Horizon make_horizon(const MayerProblem& p) {
  Horizon hz;
  hz.length = p.t_end - p.t_start;
  hz.dt = std::min(p.dt, hz.length);
  hz.steps = step_count(hz.dt, hz.length);
  hz.grid = std::min(p.control_grid, hz.steps);
  hz.h = hz.length / static_cast<double>(hz.steps);
  return hz;
}

Selection control_selection(std::shared_ptr<const Controls> controls, double t_start, const Horizon& hz) {
  return Selection::custom("piecewise-constant", [controls, t_start, hz]() -> Selection::Proposer {
    return [controls, t_start, hz](const FieldSpec&, double t, const DiscreteMeasure&,
                                   const std::vector<BallSet>&) {
      const auto step = static_cast<std::size_t>(std::max(0.0, std::round((t - t_start) / hz.h)));
      const std::size_t k = std::min(hz.grid - 1, step * hz.grid / hz.steps);
      return Proposal{(*controls)[k], false};
    };
  });
}

class Evaluator {
 public:
  Evaluator(const MayerProblem& p, const Horizon& hz) : p_(p), hz_(hz) {}

  double operator()(const Controls& c) {
    ++count_;
    auto shared = std::make_shared<const Controls>(c);
    try {
      const DiscreteMeasure terminal =
          rollout(p_.field, p_.initial, control_selection(shared, p_.t_start, hz_), hz_.dt, hz_.length, p_.t_start);
      return p_.terminal_cost(terminal);
    } catch (const IntegrationError&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  std::size_t count() const { return count_; }

 private:
  const MayerProblem& p_;
  Horizon hz_;
  std::size_t count_ = 0;
};

// Coordinate descent: perturb one (interval, particle) proposal at a time,
// keep strict improvements.
double refine(Evaluator& eval, Controls& controls, double value, const Vector& half_width,
              const MayerProblem& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int sweep = 0; sweep < p.sweeps; ++sweep) {
    const double scale = std::pow(0.5, sweep + 1);
    for (std::size_t k = 0; k < controls.size(); ++k) {
      for (Eigen::Index i = 0; i < controls[k].rows(); ++i) {
        for (int attempt = 0; attempt < p.tries_per_coordinate; ++attempt) {
          Controls trial = controls;
          for (Eigen::Index j = 0; j < trial[k].cols(); ++j) {
            trial[k](i, j) += scale * half_width(i) * gauss(rng);
          }
          const double v = eval(trial);
          if (v < value) {
            value = v;
            controls = std::move(trial);
          }
        }
      }
    }
  }
  return value;
}

}  // namespace

MayerSolution solve_mayer(const MayerProblem& p) {
  if (p.budget == 0) throw ParameterError("solve_mayer: budget must be at least 1");
  if (!p.terminal_cost) throw ParameterError("solve_mayer: terminal cost missing");
  if (p.control_grid == 0) throw ParameterError("solve_mayer: control grid must be at least 1");
  if (!(p.t_end >= p.t_start)) throw ParameterError("solve_mayer: need t_start <= t_end");

  MayerSolution sol;
  if (p.t_end == p.t_start) {
    sol.trajectory.times = {p.t_start};
    sol.trajectory.measures = {p.initial};
    sol.trajectory.selection_name = "empty-horizon";
    sol.value = p.terminal_cost(p.initial);
    return sol;
  }

  const Horizon hz = make_horizon(p);
  const DiscreteMeasure& nu = p.initial;
  const auto n = static_cast<Eigen::Index>(nu.size());
  const Eigen::Index d = nu.dim();

  // Box half-width per particle from the linear growth bound at the start.
  const double C = p.field.growth_constant();
  const double m2 = moment2(nu).value;
  Vector half_width(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    half_width(i) = C * (1.0 + m2) * (1.0 + nu.points().row(i).norm());
  }

  Evaluator eval(p, hz);
  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double best_raw = std::numeric_limits<double>::infinity();
  double best = std::numeric_limits<double>::infinity();
  Controls best_controls;
  for (std::size_t s = 0; s < p.budget; ++s) {
    Controls c(hz.grid, Matrix(n, d));
    for (Matrix& m : c) {
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m(i, j) = half_width(i) * unit(rng);
    }
    const double v = eval(c);
    if (!(v < best_raw)) continue;
    best_raw = v;
    if (v < best) {
      best = v;
      best_controls = c;
    }
    const std::uint64_t refine_seed = p.seed ^ (0x9e3779b97f4a7c15ULL * (s + 1));
    const double refined = refine(eval, c, v, half_width, p, refine_seed);
    if (refined < best) {
      best = refined;
      best_controls = std::move(c);
    }
  }

  if (best_controls.empty()) throw Error("solve_mayer: no shooting sample produced a finite cost");
  auto shared = std::make_shared<const Controls>(best_controls);
  sol.trajectory = integrate(p.field, nu, control_selection(shared, p.t_start, hz), hz.dt, hz.length, p.t_start);
  sol.value = p.terminal_cost(sol.trajectory.terminal());
  sol.best_controls = std::move(best_controls);
  sol.evaluations = eval.count();
  return sol;
}

DppReport dpp_check(const MayerProblem& problem, const TrajectoryRecord& traj, double tol_dpp, std::size_t stride) {
  if (stride == 0) throw ParameterError("dpp_check: stride must be positive");
  DppReport rep;
  rep.tol_dpp = tol_dpp;
  const std::size_t last = traj.measures.size() - 1;
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < last; k += stride) nodes.push_back(k);
  nodes.push_back(last);
  for (std::size_t k : nodes) {
    const double t = std::min(traj.times[k], problem.t_end);
    if (t < problem.t_start) continue;
    rep.times.push_back(t);
    rep.values.push_back(solve_mayer(problem.from(t, traj.measures[k])).value);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.values.size(); ++k) {
    lo = std::min(lo, rep.values[k]);
    hi = std::max(hi, rep.values[k]);
    if (k + 1 < rep.values.size()) {
      rep.max_decrease = std::max(rep.max_decrease, rep.values[k] - rep.values[k + 1]);
    }
  }
  rep.max_oscillation = rep.values.empty() ? 0.0 : hi - lo;
  rep.monotone_pass = rep.max_decrease <= tol_dpp;
  rep.constancy_pass = rep.max_oscillation <= tol_dpp;
  return rep;
}

double calibrate_tol_dpp(const MayerProblem& like) {
  const auto* ball = std::get_if<BallField>(&like.field.variant());
  if (!ball) throw ParameterError("calibrate_tol_dpp: needs a ball field");
  Vector e1 = Vector::Zero(like.initial.dim());
  e1(0) = 1.0;
  MayerProblem p = like.from(like.t_start, DiscreteMeasure::dirac(e1));
  p.terminal_cost = [](const DiscreteMeasure& mu) {
    const double m = moment2(mu).value;
    return m * m;
  };
  p.cost_name = "m2_squared";
  const double exact = std::exp(-4.0 * ball->alpha * (p.t_end - p.t_start));
  return 3.0 * std::abs(solve_mayer(p).value - exact);
}

ComparisonReport comparison_check(const LyapunovSpec& spec, const MayerProblem& base,
                                  const std::vector<ComparisonSample>& samples, double tol_dpp) {
  const double alpha = spec.rate_alpha();
  MayerProblem p = base;
  const double T = base.t_end;
  p.terminal_cost = [spec, alpha, T](const DiscreteMeasure& mu) { return std::exp(alpha * T) * eval_V(spec, mu); };
  p.cost_name = "exp_alpha_T_V";

  ComparisonReport rep;
  rep.tol_dpp = tol_dpp;
  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (const ComparisonSample& s : samples) {
    ComparisonEntry e;
    e.t = s.t;
    e.estimate = solve_mayer(p.from(s.t, s.nu)).value;
    e.bound = std::exp(alpha * s.t) * eval_V(spec, s.nu);
    e.pass = e.estimate <= e.bound + tol_dpp;
    rep.max_excess = std::max(rep.max_excess, e.estimate - e.bound);
    rep.entries.push_back(e);
  }
  if (samples.empty()) rep.max_excess = 0.0;
  rep.pass = std::all_of(rep.entries.begin(), rep.entries.end(), [](const ComparisonEntry& e) { return e.pass; });
  return rep;
}

}  // namespace wreach
