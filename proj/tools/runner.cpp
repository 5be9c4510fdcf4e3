#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "wreach/hamiltonian.hpp"
#include "wreach/io.hpp"
#include "wreach/lyapunov.hpp"
#include "wreach/mayer.hpp"
#include "wreach/transport.hpp"

namespace wreach::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ------------------------------------------------------------ config parsing

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

const json& section(const json& doc, const std::string& key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  if (!doc[key].is_object()) throw ConfigError("'" + key + "' must be an object");
  return doc[key];
}

template <class T>
void read(const json& obj, const std::string& key, T& out) {
  if (!obj.contains(key)) return;
  const json& v = obj[key];
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError("'" + key + "' must be a number");
      out = v.get<double>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError("'" + key + "' must be a string");
      out = v.get<std::string>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError("'" + key + "' must be a nonnegative integer");
      }
      out = v.get<T>();
    } else {
      out = v.get<T>();
    }
  } catch (const json::exception& e) {
    throw ConfigError("'" + key + "': " + e.what());
  }
}

DiscreteMeasure read_measure(const json& obj, const std::string& inline_key, const std::string& file_key,
                             const std::string& base_dir) {
  try {
    if (obj.contains(inline_key)) return io::measure_from_json(obj[inline_key]);
    fs::path p = obj[file_key].get<std::string>();
    if (p.is_relative()) p = fs::path(base_dir) / p;
    return io::load_measure(p.string());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("'" + inline_key + "': " + e.what());
  }
}

bool has_measure(const json& obj, const std::string& inline_key, const std::string& file_key) {
  if (obj.contains(inline_key) && obj.contains(file_key)) {
    throw ConfigError("give either '" + inline_key + "' or '" + file_key + "', not both");
  }
  return obj.contains(inline_key) || obj.contains(file_key);
}

const std::set<std::string> kSubcommands{"simulate", "certify", "mayer", "transport"};
const std::set<std::string> kSelections{"default", "analytic", "greedy", "max-contraction", "max-expansion"};
const std::set<std::string> kCosts{"m2_squared", "V", "exp_alpha_T_V"};

}  // namespace

RunConfig parse_config(const json& doc, const std::string& base_dir) {
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(doc, "config",
                 {"subcommand", "scenario", "dt", "T", "seed", "budget", "selection", "tolerances", "certify",
                  "mayer", "transport", "out"});
  RunConfig c;
  read(doc, "subcommand", c.subcommand);
  read(doc, "dt", c.dt);
  read(doc, "T", c.T);
  read(doc, "seed", c.seed);
  read(doc, "budget", c.budget);
  read(doc, "selection", c.selection);
  read(doc, "out", c.out);

  const json& sc = section(doc, "scenario");
  reject_unknown(sc, "scenario",
                 {"name", "alpha", "k", "quantization", "particles", "dim", "spread", "initial", "initial_file"});
  read(sc, "name", c.scenario);
  read(sc, "alpha", c.params.alpha);
  read(sc, "k", c.params.k);
  read(sc, "quantization", c.params.quantization);
  read(sc, "particles", c.params.particles);
  read(sc, "dim", c.params.dim);
  read(sc, "spread", c.params.spread);
  if (has_measure(sc, "initial", "initial_file")) {
    c.params.initial = read_measure(sc, "initial", "initial_file", base_dir);
  }

  const json& tol = section(doc, "tolerances");
  reject_unknown(tol, "tolerances", {"admissibility", "hji", "analytic_rel", "mean_rel", "tol_dpp"});
  read(tol, "admissibility", c.tolerances.admissibility);
  read(tol, "hji", c.tolerances.hji);
  read(tol, "analytic_rel", c.tolerances.analytic_rel);
  read(tol, "mean_rel", c.tolerances.mean_rel);
  if (tol.contains("tol_dpp") && !tol["tol_dpp"].is_null()) {
    double v = 0.0;
    read(tol, "tol_dpp", v);
    c.tolerances.tol_dpp = v;
  }

  const json& cert = section(doc, "certify");
  reject_unknown(cert, "certify", {"samples", "max_points", "radius", "pieces"});
  read(cert, "samples", c.certify.samples);
  read(cert, "max_points", c.certify.max_points);
  read(cert, "radius", c.certify.radius);
  if (cert.contains("pieces")) {
    if (!cert["pieces"].is_array() || cert["pieces"].empty()) throw ConfigError("'pieces' must be a non-empty array");
    c.certify.pieces.clear();
    for (const json& n : cert["pieces"]) {
      if (!n.is_number_integer() || n.get<long long>() < 1) throw ConfigError("'pieces' entries must be >= 1");
      c.certify.pieces.push_back(n.get<std::size_t>());
    }
  }

  const json& my = section(doc, "mayer");
  reject_unknown(my, "mayer", {"control_grid", "sweeps", "tries_per_coordinate", "dpp_stride", "cost",
                               "comparison_samples"});
  read(my, "control_grid", c.mayer.control_grid);
  read(my, "sweeps", c.mayer.sweeps);
  read(my, "tries_per_coordinate", c.mayer.tries_per_coordinate);
  read(my, "dpp_stride", c.mayer.dpp_stride);
  read(my, "cost", c.mayer.cost);
  read(my, "comparison_samples", c.mayer.comparison_samples);

  const json& tr = section(doc, "transport");
  reject_unknown(tr, "transport", {"source", "source_file", "target", "target_file"});
  if (has_measure(tr, "source", "source_file")) c.source = read_measure(tr, "source", "source_file", base_dir);
  if (has_measure(tr, "target", "target_file")) c.target = read_measure(tr, "target", "target_file", base_dir);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
  const fs::path parent = fs::path(path).parent_path();
  return parse_config(doc, parent.empty() ? "." : parent.string());
}

void validate(const RunConfig& c) {
  if (!kSubcommands.count(c.subcommand)) {
    throw ConfigError("unknown subcommand '" + c.subcommand + "' (simulate, certify, mayer or transport)");
  }
  if (!(c.dt > 0.0) || !std::isfinite(c.dt)) throw ConfigError("dt must be positive");
  if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError("T must be positive");
  if (c.budget < 1) throw ConfigError("budget must be at least 1");
  if (!kSelections.count(c.selection)) throw ConfigError("unknown selection '" + c.selection + "'");
  if (!kCosts.count(c.mayer.cost)) throw ConfigError("unknown Mayer cost '" + c.mayer.cost + "'");
  if (c.mayer.control_grid < 1 || c.mayer.dpp_stride < 1) throw ConfigError("control_grid and dpp_stride must be >= 1");
  if (c.certify.max_points < 1) throw ConfigError("certify.max_points must be >= 1");
  if (c.subcommand == "transport" && (!c.source || !c.target)) {
    throw ConfigError("transport needs 'source' and 'target' measures");
  }
  if (c.subcommand != "transport" && c.scenario != "example1" && c.scenario != "example2") {
    throw ConfigError("unknown scenario '" + c.scenario + "' (example1 or example2)");
  }
}

// ------------------------------------------------------------------- running

namespace {

struct Check {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  bool asserted = true;
  bool pass = false;
};

class Checks {
 public:
  void add(std::string name, double value, double tolerance, bool asserted) {
    checks_.push_back({std::move(name), value, tolerance, asserted, value <= tolerance});
  }
  void add_flag(std::string name, bool ok, bool asserted) {
    checks_.push_back({std::move(name), ok ? 0.0 : 1.0, 0.0, asserted, ok});
  }
  bool pass() const {
    return std::all_of(checks_.begin(), checks_.end(), [](const Check& c) { return !c.asserted || c.pass; });
  }
  json to_json() const {
    json arr = json::array();
    for (const Check& c : checks_) {
      arr.push_back({{"name", c.name}, {"value", finite_or_null(c.value)}, {"tolerance", c.tolerance},
                     {"asserted", c.asserted}, {"pass", c.pass}});
    }
    return arr;
  }
  static json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

 private:
  std::vector<Check> checks_;
};

json opt_json(const std::optional<double>& v) { return v && std::isfinite(*v) ? json(*v) : json(nullptr); }

json scenario_json(const RunConfig& c, const Scenario& s) {
  json j{{"name", s.name}, {"field", s.field.name()}, {"lyapunov", s.lyapunov.name()},
         {"rate_alpha", s.lyapunov.rate_alpha()}, {"particles", s.initial.size()}, {"dim", s.initial.dim()}};
  if (s.name == "example1") j["alpha"] = c.params.alpha;
  if (s.name == "example2") {
    j["k"] = c.params.k;
    j["quantization"] = c.params.quantization;
  }
  return j;
}

// Image centres: for single-valued fields this is the field itself.
Selection image_centre() {
  return Selection::custom("image-centre", []() -> Selection::Proposer {
    return [](const FieldSpec&, double, const DiscreteMeasure& mu, const std::vector<BallSet>& images) {
      Matrix v(mu.points().rows(), mu.points().cols());
      for (std::size_t i = 0; i < images.size(); ++i) v.row(static_cast<Eigen::Index>(i)) = images[i].center.transpose();
      return Proposal{std::move(v), false};
    };
  });
}

std::string resolve_selection_name(const RunConfig& c) {
  if (c.selection != "default") return c.selection;
  return c.subcommand == "certify" ? "greedy" : "analytic";
}

Selection make_selection(const std::string& name, const Scenario& s) {
  if (name == "greedy") return lyapunov_greedy(s.lyapunov);
  if (name == "max-contraction") return Selection::max_contraction();
  if (name == "max-expansion") return Selection::max_expansion();
  // analytic
  if (s.name == "example1") return Selection::linear_decay(s.params.alpha);
  return image_centre();
}

// Selections along which the Lyapunov function is expected to decay.
bool decay_expected(const std::string& selection, const Scenario& s) {
  return s.name == "example1" && (selection == "analytic" || selection == "greedy" || selection == "max-contraction");
}

fs::path prepare_out(const RunConfig& c) {
  fs::path out(c.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error("cannot create output directory " + out.string() + ": " + ec.message());
  return out;
}

void write_json(const fs::path& path, const json& j) { io::write_file(path.string(), j.dump(2) + "\n"); }

std::vector<double> w2_series(const TrajectoryRecord& traj, const DiscreteMeasure& target) {
  std::vector<double> out;
  out.reserve(traj.measures.size());
  for (const auto& mu : traj.measures) out.push_back(w2(mu, target));
  return out;
}

// HJI sample clouds. A target with non-uniform weights only admits maps from
// clouds carrying the same weights, so those samples are moved copies of it.
std::vector<DiscreteMeasure> hji_samples(const RunConfig& c, const Scenario& s) {
  std::mt19937_64 rng(c.seed ^ 0x5a5a5a5aULL);
  std::vector<DiscreteMeasure> out;
  const int d = s.initial.dim();
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto* w2_target = std::get_if<HalfW2SquaredTo>(&s.lyapunov.variant());
  const bool copies = w2_target && !w2_target->target.is_uniform();
  std::uniform_int_distribution<std::size_t> nd(1, c.certify.max_points);
  for (std::size_t k = 0; k < c.certify.samples; ++k) {
    if (copies) {
      const DiscreteMeasure& t = w2_target->target;
      const double scale = 0.2 + 2.8 * u(rng);
      Vector shift(d);
      for (int j = 0; j < d; ++j) shift(j) = g(rng);
      shift *= c.certify.radius * 0.1 * u(rng) / std::max(shift.norm(), 1e-300);
      out.push_back(t.with_points((scale * t.points()).rowwise() + shift.transpose()));
      continue;
    }
    const std::size_t n = nd(rng);
    Matrix X(static_cast<Eigen::Index>(n), d);
    Vector w(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      Vector z(d);
      for (int j = 0; j < d; ++j) z(j) = g(rng);
      X.row(i) = (c.certify.radius * std::pow(u(rng), 1.0 / d) / std::max(z.norm(), 1e-300)) * z.transpose();
      w(i) = 0.1 + u(rng);
    }
    out.push_back(DiscreteMeasure::make(std::move(X), std::move(w)));
  }
  return out;
}

json decay_json(const DecayReport& d, bool asserted) {
  return {{"rate_fit", opt_json(d.rate_fit)}, {"max_uptick", d.max_uptick}, {"tol_step", d.tol_step},
          {"fallback_steps", d.fallback_steps}, {"asserted", asserted}, {"pass", d.pass}};
}

// ---------------------------------------------------------------- simulate

int run_simulate(const RunConfig& c, const Scenario& s, std::ostream& log) {
  const fs::path out = prepare_out(c);
  const std::string sel_name = resolve_selection_name(c);
  const Selection sel = make_selection(sel_name, s);

  const DecayReport decay = decay_run(s.lyapunov, s.field, s.initial, c.T, c.dt, sel);
  const TrajectoryRecord& traj = decay.trajectory;
  const AdmissibilityReport adm = check_admissible(s.field, traj, c.tolerances.admissibility);
  const std::vector<double> w2 = w2_series(traj, s.target);

  Checks checks;
  checks.add("admissibility", adm.max_residual, c.tolerances.admissibility, true);
  const bool decay_asserted = decay_expected(sel_name, s);
  checks.add("decay_uptick", decay.max_uptick, decay.tol_step, decay_asserted);

  json analytic = nullptr;
  if (s.name == "example1" && sel_name == "analytic") {
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double ref = std::get<double>(analytic_reference(s, "V", traj.times[k]));
      if (ref > 0.0) worst = std::max(worst, std::abs(decay.V_values[k] / ref - 1.0));
    }
    checks.add("analytic_V_rel_error", worst, c.tolerances.analytic_rel, true);
    analytic = {{"curve", "V"}, {"max_rel_error", worst}, {"tolerance", c.tolerances.analytic_rel}};
  } else if (s.name == "example2") {
    double worst = 0.0;
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
      const double ref = std::get<double>(analytic_reference(s, "mean_norm", traj.times[k]));
      if (ref > 0.0) worst = std::max(worst, std::abs(traj.measures[k].mean().norm() / ref - 1.0));
    }
    checks.add("mean_norm_rel_error", worst, c.tolerances.mean_rel, true);
    analytic = {{"curve", "mean_norm"}, {"max_rel_error", worst}, {"tolerance", c.tolerances.mean_rel}};
  }

  {
    std::ostringstream os;
    io::write_trajectory_csv(os, traj);
    io::write_file((out / "trajectory.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    io::write_summary_csv(os, traj, adm);
    io::write_file((out / "summary.csv").string(), os.str());
  }
  {
    std::ostringstream os;
    io::write_decay_csv(os, decay, w2);
    io::write_file((out / "decay.csv").string(), os.str());
  }

  const bool pass = checks.pass();
  json report{{"subcommand", "simulate"},
              {"scenario", scenario_json(c, s)},
              {"selection", traj.selection_name},
              {"dt", c.dt},
              {"T", c.T},
              {"seed", c.seed},
              {"steps", traj.steps()},
              {"admissibility",
               {{"max_residual", adm.max_residual},
                {"max_speed", adm.max_speed},
                {"growth_ok", adm.growth_ok},
                {"tolerance", c.tolerances.admissibility},
                {"pass", adm.pass}}},
              {"decay", decay_json(decay, decay_asserted)},
              {"terminal_w2_to_target", w2.back()},
              {"analytic", analytic},
              {"checks", checks.to_json()},
              {"pass", pass}};
  write_json(out / "report.json", report);
  log << "simulate " << s.name << ": " << traj.steps() << " steps, " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

// ----------------------------------------------------------------- certify

int run_certify(const RunConfig& c, const Scenario& s, std::ostream& log) {
  const fs::path out = prepare_out(c);
  const bool certified_case = s.name == "example1";  // example2 residuals are diagnostics only

  double residual_max = -std::numeric_limits<double>::infinity();
  std::size_t valid = 0;
  const std::vector<DiscreteMeasure> samples = hji_samples(c, s);
  for (const DiscreteMeasure& nu : samples) {
    if (auto r = hji_residual(s.lyapunov, s.field, nu)) {
      residual_max = std::max(residual_max, *r);
      ++valid;
    }
  }

  const std::string sel_name = resolve_selection_name(c);
  const Selection sel = make_selection(sel_name, s);
  const ReachabilityReport reach = reachability_run(s.lyapunov, s.field, s.initial, s.target, c.T, c.dt, sel);
  const DecayReport& decay = reach.decay;
  const AdmissibilityReport adm = check_admissible(s.field, decay.trajectory, c.tolerances.admissibility);

  json pieces = json::array();
  bool viability_pass = true;
  for (std::size_t n : c.certify.pieces) {
    const ViabilityReport v = viability_glue(s.lyapunov, s.field, s.initial, c.T, n, c.dt, sel);
    double worst = -std::numeric_limits<double>::infinity();
    for (const ViabilityPiece& p : v.pieces) worst = std::max(worst, p.max_violation - p.tolerance);
    pieces.push_back({{"n", n},
                      {"max_violation_minus_tolerance", worst},
                      {"end_to_end_uptick", v.end_to_end_uptick},
                      {"tolerance", v.tolerance},
                      {"pass", v.pass}});
    viability_pass = viability_pass && v.pass;
  }

  const bool decay_asserted = certified_case && decay_expected(sel_name, s);
  Checks checks;
  checks.add("admissibility", adm.max_residual, c.tolerances.admissibility, true);
  checks.add("hji_residual_max", valid ? residual_max : 0.0, c.tolerances.hji, certified_case);
  checks.add_flag("hji_samples_valid", valid == samples.size(), certified_case);
  checks.add("decay_uptick", decay.max_uptick, decay.tol_step, decay_asserted);
  checks.add_flag("viability", viability_pass, decay_asserted);

  {
    std::ostringstream os;
    io::write_decay_csv(os, decay, reach.w2_to_target);
    io::write_file((out / "decay.csv").string(), os.str());
  }

  const bool pass = checks.pass();
  json report{{"subcommand", "certify"},
              {"spec", s.lyapunov.name()},
              {"field", s.field.name()},
              {"scenario", scenario_json(c, s)},
              {"selection", decay.trajectory.selection_name},
              {"dt", c.dt},
              {"T", c.T},
              {"seed", c.seed},
              {"samples", samples.size()},
              {"valid_samples", valid},
              {"residual_max", valid ? json(residual_max) : json(nullptr)},
              {"hji_asserted", certified_case},
              {"decay", decay_json(decay, decay_asserted)},
              {"viability", {{"pieces", pieces}, {"asserted", decay_asserted}, {"pass", viability_pass}}},
              {"reachability",
               {{"terminal_w2", reach.terminal_w2},
                {"rate_fit", opt_json(reach.rate_fit)},
                {"max_m2", reach.max_m2},
                {"max_m2eps", reach.max_m2eps}}},
              {"checks", checks.to_json()},
              {"pass", pass}};
  write_json(out / "report.json", report);
  log << "certify " << s.name << ": residual max " << (valid ? residual_max : 0.0) << " over " << valid << "/"
      << samples.size() << " samples, " << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

// ------------------------------------------------------------------- mayer

TerminalCost make_cost(const std::string& name, const Scenario& s, double T) {
  const LyapunovSpec spec = s.lyapunov;
  if (name == "V") return [spec](const DiscreteMeasure& mu) { return eval_V(spec, mu); };
  if (name == "exp_alpha_T_V") {
    const double f = std::exp(spec.rate_alpha() * T);
    return [spec, f](const DiscreteMeasure& mu) { return f * eval_V(spec, mu); };
  }
  return [](const DiscreteMeasure& mu) {
    const double m = moment2(mu).value;
    return m * m;
  };
}

json dpp_json(const DppReport& d) {
  return {{"nodes", d.values.size()},
          {"max_decrease", d.max_decrease},
          {"max_oscillation", d.max_oscillation},
          {"monotone_pass", d.monotone_pass},
          {"constancy_pass", d.constancy_pass}};
}

int run_mayer(const RunConfig& c, const Scenario& s, std::ostream& log) {
  const fs::path out = prepare_out(c);
  MayerProblem p{s.field, make_cost(c.mayer.cost, s, c.T), c.mayer.cost, s.initial};
  p.t_start = 0.0;
  p.t_end = c.T;
  p.control_grid = c.mayer.control_grid;
  p.budget = c.budget;
  p.seed = c.seed;
  p.dt = c.dt;
  p.sweeps = c.mayer.sweeps;
  p.tries_per_coordinate = c.mayer.tries_per_coordinate;

  const MayerSolution sol = solve_mayer(p);
  const AdmissibilityReport adm = check_admissible(s.field, sol.trajectory, c.tolerances.admissibility);

  double tol_dpp = 1e-9;
  std::string tol_source = "default";
  if (c.tolerances.tol_dpp) {
    tol_dpp = *c.tolerances.tol_dpp;
    tol_source = "config";
  } else if (std::holds_alternative<BallField>(s.field.variant())) {
    tol_dpp = calibrate_tol_dpp(p);
    tol_source = "calibrated";
  }

  const DppReport along_solution = dpp_check(p, sol.trajectory, tol_dpp, c.mayer.dpp_stride);
  const std::string ref_name = resolve_selection_name(c);
  const TrajectoryRecord reference = integrate(s.field, s.initial, make_selection(ref_name, s), c.dt, c.T);
  const DppReport along_reference = dpp_check(p, reference, tol_dpp, c.mayer.dpp_stride);

  Checks checks;
  checks.add("admissibility", adm.max_residual, c.tolerances.admissibility, true);
  checks.add("dpp_reference_max_decrease", along_reference.max_decrease, tol_dpp, true);
  checks.add("dpp_solution_max_decrease", along_solution.max_decrease, tol_dpp, true);
  checks.add("dpp_solution_oscillation", along_solution.max_oscillation, tol_dpp, false);

  json comparison = nullptr;
  if (c.mayer.comparison_samples > 0) {
    std::mt19937_64 rng(c.seed ^ 0xc0ffeeULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<ComparisonSample> samples;
    const bool copies = std::holds_alternative<HalfW2SquaredTo>(s.lyapunov.variant()) && !s.target.is_uniform();
    for (std::size_t k = 0; k < c.mayer.comparison_samples; ++k) {
      const double t = k % 2 == 0 ? 0.0 : c.T / 2.0;
      if (copies) {
        samples.push_back({t, s.target.with_points((1.0 + 0.5 * u(rng)) * s.target.points())});
        continue;
      }
      Matrix X(s.initial.points().rows(), s.initial.dim());
      for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j) X(i, j) = c.params.spread * u(rng);
      samples.push_back({t, DiscreteMeasure::uniform(std::move(X))});
    }
    const ComparisonReport cmp = comparison_check(s.lyapunov, p, samples, tol_dpp);
    checks.add("comparison_max_excess", cmp.max_excess, tol_dpp, s.name == "example1");
    comparison = {{"samples", samples.size()}, {"max_excess", cmp.max_excess}, {"pass", cmp.pass}};
  }

  {
    std::ostringstream os;
    os << "trajectory,t,value\n";
    for (const auto& [label, d] : {std::pair<const char*, const DppReport*>{"solution", &along_solution},
                                   std::pair<const char*, const DppReport*>{"reference", &along_reference}}) {
      for (std::size_t k = 0; k < d->times.size(); ++k) {
        os << label << ',' << io::fmt(d->times[k]) << ',' << io::fmt(d->values[k]) << '\n';
      }
    }
    io::write_file((out / "mayer.csv").string(), os.str());
  }

  json controls = json::array();
  for (const Matrix& m : sol.best_controls) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    controls.push_back(std::move(rows));
  }

  const bool pass = checks.pass();
  json report{{"subcommand", "mayer"},
              {"scenario", scenario_json(c, s)},
              {"cost", c.mayer.cost},
              {"dt", c.dt},
              {"T", c.T},
              {"seed", c.seed},
              {"budget", c.budget},
              {"value", sol.value},
              {"evaluations", sol.evaluations},
              {"controls", controls},
              {"tol_dpp", tol_dpp},
              {"tol_dpp_source", tol_source},
              {"dpp_solution", dpp_json(along_solution)},
              {"dpp_reference", dpp_json(along_reference)},
              {"reference_selection", reference.selection_name},
              {"comparison", comparison},
              {"checks", checks.to_json()},
              {"pass", pass}};
  write_json(out / "report.json", report);
  log << "mayer " << s.name << ": value " << io::fmt(sol.value) << ", tol_dpp " << tol_dpp << ", "
      << (pass ? "pass" : "FAIL") << "\n";
  return pass ? 0 : 2;
}

// --------------------------------------------------------------- transport

int run_transport(const RunConfig& c, std::ostream& log) {
  const fs::path out = prepare_out(c);
  const TransportPlan plan = solve_ot(*c.source, *c.target);
  const double row_err = (plan.matrix.rowwise().sum() - plan.source.weights()).cwiseAbs().maxCoeff();
  const double col_err = (plan.matrix.colwise().sum().transpose() - plan.target.weights()).cwiseAbs().maxCoeff();
  const double marginal_error = std::max(row_err, col_err);

  Checks checks;
  checks.add("marginal_error", marginal_error, 1e-10, true);
  checks.add_flag("optimal", plan.optimal, true);

  write_json(out / "plan.json", io::plan_to_json(plan));
  const bool pass = checks.pass();
  json report{{"subcommand", "transport"},
              {"source_atoms", plan.source.size()},
              {"target_atoms", plan.target.size()},
              {"dim", plan.source.dim()},
              {"cost", plan.cost},
              {"w2", std::sqrt(std::max(plan.cost, 0.0))},
              {"optimal", plan.optimal},
              {"is_map", is_induced_by_map(plan)},
              {"marginal_error", marginal_error},
              {"checks", checks.to_json()},
              {"pass", pass}};
  write_json(out / "report.json", report);
  log << "transport: W2 = " << io::fmt(std::sqrt(std::max(plan.cost, 0.0))) << ", " << (pass ? "pass" : "FAIL")
      << "\n";
  return pass ? 0 : 2;
}

}  // namespace

int run_scenario(const RunConfig& config, std::ostream& log) {
  validate(config);
  if (config.subcommand == "transport") return run_transport(config, log);

  Scenario s = [&] {
    try {
      return build_scenario(config.scenario, config.params, config.seed);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }();
  if (config.subcommand == "simulate") return run_simulate(config, s, log);
  if (config.subcommand == "certify") return run_certify(config, s, log);
  return run_mayer(config, s, log);
}

}  // namespace wreach::cli
