#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wreach: particle-level Lyapunov reachability certification on Wasserstein space"};
  app.require_subcommand(1, 1);

  std::string config_path;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt, T;
  std::optional<std::size_t> budget;

  for (const char* name : {"simulate", "certify", "mayer", "transport"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON run configuration")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--seed", seed, "random seed");
    sub->add_option("--dt", dt, "time step");
    sub->add_option("--T", T, "horizon");
    sub->add_option("--budget", budget, "shooting samples for mayer");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    wreach::cli::RunConfig config = wreach::cli::load_config(config_path);
    config.subcommand = app.get_subcommands().front()->get_name();
    if (out) config.out = *out;
    if (seed) config.seed = *seed;
    if (dt) config.dt = *dt;
    if (T) config.T = *T;
    if (budget) config.budget = *budget;
    return wreach::cli::run_scenario(config, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "wreach: " << e.what() << "\n";
    return 1;
  }
}
