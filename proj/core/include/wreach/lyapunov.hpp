#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wreach/dynamics.hpp"
#include "wreach/hamiltonian.hpp"

namespace wreach {

/// V(nu) = 1/2 m2(nu)^2
struct HalfM2Squared {};

/// V(nu) = 1/2 W2(nu, target)^2
struct HalfW2SquaredTo {
  DiscreteMeasure target;
};

struct CustomLyapunov {
  std::string name = "custom";
  std::function<double(const DiscreteMeasure&)> value;
  /// Optional closed-form subdifferential candidate; nullopt marks an invalid sample.
  std::function<std::optional<Displacement>(const DiscreteMeasure&)> subdiff;
  /// Lipschitz constant of V on the region of interest (used for step tolerances).
  double lipschitz = 1.0;
};

class LyapunovSpec {
 public:
  using Variant = std::variant<HalfM2Squared, HalfW2SquaredTo, CustomLyapunov>;

  LyapunovSpec(Variant v, double rate_alpha);

  static LyapunovSpec half_m2_squared(double rate_alpha) { return {HalfM2Squared{}, rate_alpha}; }
  static LyapunovSpec half_w2_squared_to(DiscreteMeasure target, double rate_alpha) {
    return {HalfW2SquaredTo{std::move(target)}, rate_alpha};
  }

  const Variant& variant() const { return variant_; }
  double rate_alpha() const { return rate_alpha_; }
  std::string name() const;

 private:
  Variant variant_;
  double rate_alpha_;
};

double eval_V(const LyapunovSpec& spec, const DiscreteMeasure& nu);

struct SubdiffCandidate {
  Displacement p;
  bool valid = false;
};

/// Closed-form delta = 0 subdifferential: p = id for 1/2 m2^2, p = id - T for
/// 1/2 W2^2(., target) with T the optimal map (invalid when the optimal plan
/// splits mass).
SubdiffCandidate subdiff_candidate(const LyapunovSpec& spec, const DiscreteMeasure& nu);

/// alpha V(nu) + H_F(nu, p) for the subdifferential candidate at nu, or
/// nullopt when the candidate is invalid (skipped sample).
std::optional<double> hji_residual(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& nu);

/// Greedy steering against the subdifferential candidate of `spec`.
Selection lyapunov_greedy(const LyapunovSpec& spec);

struct DecayReport {
  std::vector<double> times;
  std::vector<double> V_values;
  std::vector<double> S_values;  // e^{alpha (t - t0)} V(mu_t)
  double max_uptick = 0.0;       // max_n S_{n+1} - S_n
  double tol_step = 0.0;         // per-step Euler budget
  std::optional<double> rate_fit;  // -slope of the least-squares fit of log V
  std::size_t fallback_steps = 0;
  bool pass = false;
  TrajectoryRecord trajectory;
};

/// Integrates from mu0 over [t0, t0 + T] and checks that S is nonincreasing
/// up to tol_step = (L_V V_max alpha + L_V speed_max) h. Default selection is
/// lyapunov_greedy(spec).
DecayReport decay_run(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0, double T,
                      double dt, const std::optional<Selection>& selection = std::nullopt, double t0 = 0.0);

struct ViabilityPiece {
  std::size_t index = 0;
  double t_start = 0.0;
  double t_end = 0.0;
  /// max over nodes of e^{alpha (t - t_start)} V(mu_t) - V(mu_{t_start})
  double max_violation = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct ViabilityReport {
  std::vector<ViabilityPiece> pieces;
  std::vector<double> times;               // glued grid
  std::vector<DiscreteMeasure> measures;   // glued nodes
  std::vector<double> S_values;            // e^{alpha t} V(mu_t) on the glued grid
  double end_to_end_uptick = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Restarts decay_run on each [kT/n, (k+1)T/n] from the previous endpoint and
/// checks the per-piece epigraph condition and end-to-end monotonicity.
ViabilityReport viability_glue(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0,
                               double T, std::size_t n, double dt,
                               const std::optional<Selection>& selection = std::nullopt);

struct ReachabilityReport {
  DecayReport decay;
  std::vector<double> w2_to_target;
  double terminal_w2 = 0.0;
  std::optional<double> rate_fit;
  double max_m2 = 0.0;
  double max_m2eps = 0.0;  // m_{2+eps} with eps = 1
};

ReachabilityReport reachability_run(const LyapunovSpec& spec, const FieldSpec& F, const DiscreteMeasure& mu0,
                                    const DiscreteMeasure& target, double T, double dt,
                                    const std::optional<Selection>& selection = std::nullopt);

/// Least-squares decay rate of log(values) against times; nullopt when fewer
/// than two positive values are available.
std::optional<double> fit_exponential_rate(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace wreach
