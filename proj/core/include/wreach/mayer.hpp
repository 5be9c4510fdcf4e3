#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wreach/dynamics.hpp"
#include "wreach/lyapunov.hpp"

namespace wreach {

using TerminalCost = std::function<double(const DiscreteMeasure&)>;

/// Mayer problem: minimize g(mu_T) over admissible particle flows started
/// from `initial` at `t_start`.
struct MayerProblem {
  FieldSpec field;
  TerminalCost terminal_cost;
  std::string cost_name = "g";
  DiscreteMeasure initial;
  double t_start = 0.0;
  double t_end = 1.0;
  std::size_t control_grid = 5;  // piecewise-constant intervals
  std::size_t budget = 200;      // random shooting samples
  std::uint64_t seed = 0;
  double dt = 1e-2;
  int sweeps = 3;                // coordinate-descent refinement sweeps
  int tries_per_coordinate = 4;

  /// Same problem restarted from (t, nu).
  MayerProblem from(double t, DiscreteMeasure nu) const;
};

struct MayerSolution {
  double value = 0.0;  // g(trajectory.terminal())
  std::vector<Matrix> best_controls;  // per interval, one proposal row per particle
  TrajectoryRecord trajectory;
  std::size_t evaluations = 0;
};

/// Random shooting over piecewise-constant proposals drawn in a box scaled by
/// the growth bound, projected onto the field images during integration.
/// Every time the best raw sample improves, it is refined by coordinate
/// descent. The returned value is an upper bound on the value function and
/// never increases when the budget grows (same seed).
MayerSolution solve_mayer(const MayerProblem& problem);

struct DppReport {
  std::vector<double> times;
  std::vector<double> values;
  double max_decrease = 0.0;     // max(0, max_k U_k - U_{k+1})
  double max_oscillation = 0.0;  // max_k U_k - min_k U_k
  double tol_dpp = 0.0;
  bool monotone_pass = false;
  bool constancy_pass = false;
};

/// Estimates U_g(t_k, mu_{t_k}) at every `stride`-th node of `traj` (and at
/// its final node) with the problem's budget.
DppReport dpp_check(const MayerProblem& problem, const TrajectoryRecord& traj, double tol_dpp,
                    std::size_t stride = 1);

/// 3 x |estimate - exact| on the single-particle ball-field case with
/// g = m2^2 started at e_1, where U_g(t, delta_x) = exp(-4 alpha (T - t)) |x|^2.
/// Uses the horizon, grid, budget, dt and seed of `like`; its field must be a
/// BallField.
double calibrate_tol_dpp(const MayerProblem& like);

struct ComparisonSample {
  double t = 0.0;
  DiscreteMeasure nu;
};

struct ComparisonEntry {
  double t = 0.0;
  double estimate = 0.0;  // U_g(t, nu) with g = e^{alpha T} V
  double bound = 0.0;     // e^{alpha t} V(nu)
  bool pass = false;
};

struct ComparisonReport {
  std::vector<ComparisonEntry> entries;
  double max_excess = 0.0;  // max estimate - bound
  double tol_dpp = 0.0;
  bool pass = false;
};

/// Checks U_g(t, nu) <= e^{alpha t} V(nu) + tol_dpp for g = e^{alpha T} V,
/// using `base` for field, horizon end, grid, budget, dt and seed.
ComparisonReport comparison_check(const LyapunovSpec& spec, const MayerProblem& base,
                                  const std::vector<ComparisonSample>& samples, double tol_dpp);

}  // namespace wreach
