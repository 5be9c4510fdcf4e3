#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wreach/errors.hpp"
#include "wreach/scenarios.hpp"

namespace wreach::cli {

// Malformed or inconsistent configuration; maps to exit status 1.
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Tolerances {
  double admissibility = 1e-9;
  double hji = 1e-9;
  double analytic_rel = 1e-2;  // example1 V(t) against e^{-2 alpha t} V(mu0)
  double mean_rel = 1e-3;      // example2 |mean| against e^{-kt} |mean(mu0)|
  std::optional<double> tol_dpp;  // calibrated when absent
};

struct CertifyOptions {
  std::size_t samples = 100;
  std::size_t max_points = 10;
  double radius = 10.0;
  std::vector<std::size_t> pieces{1, 2, 4, 8};
};

struct MayerOptions {
  std::size_t control_grid = 5;
  int sweeps = 3;
  int tries_per_coordinate = 4;
  std::size_t dpp_stride = 10;
  std::string cost = "m2_squared";  // m2_squared | V | exp_alpha_T_V
  std::size_t comparison_samples = 20;
};

struct RunConfig {
  std::string subcommand;  // simulate | certify | mayer | transport
  std::string scenario = "example1";
  ScenarioParams params;
  double dt = 1e-3;
  double T = 1.0;
  std::uint64_t seed = 0;
  std::size_t budget = 200;
  std::string selection = "default";  // default | analytic | greedy | max-contraction | max-expansion
  Tolerances tolerances;
  CertifyOptions certify;
  MayerOptions mayer;
  std::optional<DiscreteMeasure> source;  // transport
  std::optional<DiscreteMeasure> target;
  std::string out = ".";
};

/// Parses a config document. Relative measure file paths resolve against
/// `base_dir`. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc, const std::string& base_dir = ".");

RunConfig load_config(const std::string& path);

/// Checks the invariants dt > 0, T > 0, budget >= 1 and a known subcommand.
void validate(const RunConfig& config);

/// Runs one subcommand and writes its artifacts under config.out.
/// Returns 0 when every asserted check passes and 2 otherwise.
int run_scenario(const RunConfig& config, std::ostream& log);

}  // namespace wreach::cli
