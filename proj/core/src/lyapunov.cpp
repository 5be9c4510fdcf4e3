#include "wreach/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "wreach/errors.hpp"

namespace wreach {

LyapunovSpec::LyapunovSpec(Variant v, double rate_alpha) : variant_(std::move(v)), rate_alpha_(rate_alpha) {
  if (!(rate_alpha > 0.0) || !std::isfinite(rate_alpha)) {
    throw ParameterError("Lyapunov rate alpha must be positive");
  }
  if (const auto* c = std::get_if<CustomLyapunov>(&variant_); c && !c->value) {
    throw ConstructionError("custom Lyapunov function needs an evaluator");
  }
}

std::string LyapunovSpec::name() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HalfM2Squared>) {
          return "half_m2_squared";
        } else if constexpr (std::is_same_v<T, HalfW2SquaredTo>) {
          return "half_w2_squared_to_target";
        } else {
          return v.name;
        }
      },
      variant_);
}

double eval_V(const LyapunovSpec& spec, const DiscreteMeasure& nu) {
  return std::visit(
      [&nu](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HalfM2Squared>) {
          const double m = moment2(nu).value;
          return 0.5 * m * m;
        } else if constexpr (std::is_same_v<T, HalfW2SquaredTo>) {
          return 0.5 * solve_ot(nu, v.target).cost;
        } else {
          return v.value(nu);
        }
      },
      spec.variant());
}

SubdiffCandidate subdiff_candidate(const LyapunovSpec& spec, const DiscreteMeasure& nu) {
  return std::visit(
      [&nu](const auto& v) -> SubdiffCandidate {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HalfM2Squared>) {
          return {Displacement{nu, nu.points()}, true};
        } else if constexpr (std::is_same_v<T, HalfW2SquaredTo>) {
          const TransportPlan plan = solve_ot(nu, v.target);
          return {Displacement{nu, nu.points() - row_barycenters(plan)}, is_induced_by_map(plan)};
        } else {
          if (!v.subdiff) return {Displacement{nu, Matrix::Zero(nu.points().rows(), nu.points().cols())}, false};
          std::optional<Displacement> p = v.subdiff(nu);
          if (!p) return {Displacement{nu, Matrix::Zero(nu.points().rows(), nu.points().cols())}, false};
          return {std::move(*p), true};
        }
      },
      spec.variant());
}

std::optional<double> hji_residual(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& nu) {
  const SubdiffCandidate cand = subdiff_candidate(spec, nu);
  if (!cand.valid) return std::nullopt;
  return spec.rate_alpha() * eval_V(spec, nu) + hamiltonian(F, nu, cand.p).value;
}

Selection lyapunov_greedy(const LyapunovSpec& spec) {
  return Selection::greedy(
      [spec](const DiscreteMeasure& mu) -> std::optional<Displacement> {
        SubdiffCandidate cand = subdiff_candidate(spec, mu);
        if (!cand.valid) return std::nullopt;
        return std::move(cand.p);
      },
      "greedy:" + spec.name());
}

std::optional<double> fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values) {
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < std::min(times.size(), values.size()); ++k) {
    if (!(values[k] > 0.0)) continue;
    const double y = std::log(values[k]);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
    ++count;
  }
  if (count < 2) return std::nullopt;
  const double n = static_cast<double>(count);
  const double denom = n * stt - st * st;
  if (!(std::abs(denom) > 0.0)) return std::nullopt;
  return -(n * sty - st * sy) / denom;
}

namespace {

// Lipschitz constant of V over the visited region, per variant.
double lipschitz_of_V(const LyapunovSpec& spec, const TrajectoryRecord& traj, const std::vector<double>& V) {
  return std::visit(
      [&](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, HalfM2Squared>) {
          double r = 0.0;
          for (const auto& mu : traj.measures) r = std::max(r, moment2(mu).value);
          return r;
        } else if constexpr (std::is_same_v<T, HalfW2SquaredTo>) {
          double r = 0.0;
          for (double value : V) r = std::max(r, std::sqrt(2.0 * value));
          return r;
        } else {
          return v.lipschitz;
        }
      },
      spec.variant());
}

}  // namespace

DecayReport decay_run(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0, double T,
                      double dt, const std::optional<Selection>& selection, double t0) {
  const Selection sel = selection ? *selection : lyapunov_greedy(spec);
  DecayReport rep;
  rep.trajectory = integrate(F, mu0, sel, dt, T, t0);
  const TrajectoryRecord& traj = rep.trajectory;
  const double alpha = spec.rate_alpha();

  rep.times = traj.times;
  rep.V_values.reserve(traj.measures.size());
  rep.S_values.reserve(traj.measures.size());
  for (std::size_t k = 0; k < traj.measures.size(); ++k) {
    const double v = eval_V(spec, traj.measures[k]);
    rep.V_values.push_back(v);
    rep.S_values.push_back(std::exp(alpha * (traj.times[k] - t0)) * v);
  }

  double speed_max = 0.0;
  for (const Displacement& v : traj.velocities) speed_max = std::max(speed_max, v.l2_norm());
  for (const StepDiagnostics& d : traj.diagnostics) rep.fallback_steps += d.fallback ? 1 : 0;
  const double V_max = *std::max_element(rep.V_values.begin(), rep.V_values.end());
  const double L_V = lipschitz_of_V(spec, traj, rep.V_values);
  const double h = traj.steps() > 0 ? traj.times[1] - traj.times[0] : 0.0;
  rep.tol_step = (L_V * V_max * alpha + L_V * speed_max) * h;

  rep.max_uptick = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < rep.S_values.size(); ++k) {
    rep.max_uptick = std::max(rep.max_uptick, rep.S_values[k + 1] - rep.S_values[k]);
  }
  if (rep.S_values.size() < 2) rep.max_uptick = 0.0;
  rep.rate_fit = fit_exponential_rate(rep.times, rep.V_values);
  rep.pass = rep.max_uptick <= rep.tol_step;
  return rep;
}

ViabilityReport viability_glue(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0,
                               double T, std::size_t n, double dt, const std::optional<Selection>& selection) {
  if (n < 1) throw ParameterError("viability_glue: need at least one piece");
  if (!(T > 0.0)) throw ParameterError("viability_glue: T must be positive");
  const double alpha = spec.rate_alpha();
  const double piece = T / static_cast<double>(n);

  ViabilityReport rep;
  DiscreteMeasure start = mu0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t_start = static_cast<double>(k) * piece;
    DecayReport d = decay_run(spec, F, start, piece, dt, selection, t_start);

    ViabilityPiece p;
    p.index = k;
    p.t_start = t_start;
    p.t_end = d.times.back();
    p.tolerance = d.tol_step;
    p.max_violation = -std::numeric_limits<double>::infinity();
    const double V0 = d.V_values.front();
    for (double s : d.S_values) p.max_violation = std::max(p.max_violation, s - V0);
    p.pass = p.max_violation <= p.tolerance;
    rep.pieces.push_back(p);
    rep.tolerance = std::max(rep.tolerance, d.tol_step);

    for (std::size_t j = (k == 0 ? 0 : 1); j < d.times.size(); ++j) {
      rep.times.push_back(d.times[j]);
      rep.measures.push_back(d.trajectory.measures[j]);
      rep.S_values.push_back(std::exp(alpha * d.times[j]) * d.V_values[j]);
    }
    start = d.trajectory.terminal();
  }

  rep.end_to_end_uptick = rep.S_values.size() < 2 ? 0.0 : -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j + 1 < rep.S_values.size(); ++j) {
    rep.end_to_end_uptick = std::max(rep.end_to_end_uptick, rep.S_values[j + 1] - rep.S_values[j]);
  }
  rep.pass = std::all_of(rep.pieces.begin(), rep.pieces.end(), [](const ViabilityPiece& p) { return p.pass; }) &&
             rep.end_to_end_uptick <= rep.tolerance;
  return rep;
}

ReachabilityReport reachability_run(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0,
                                    const DiscreteMeasure& target, double T, double dt,
                                    const std::optional<Selection>& selection) {
  ReachabilityReport rep;
  rep.decay = decay_run(spec, F, mu0, T, dt, selection);
  for (const DiscreteMeasure& mu : rep.decay.trajectory.measures) {
    rep.w2_to_target.push_back(w2(mu, target));
    rep.max_m2 = std::max(rep.max_m2, moment2(mu).value);
    rep.max_m2eps = std::max(rep.max_m2eps, moment2eps(mu, 1.0).value);
  }
  rep.terminal_w2 = rep.w2_to_target.back();
  rep.rate_fit = rep.decay.rate_fit;
  return rep;
}

}  // namespace wreach
