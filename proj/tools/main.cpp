#include "commands.hpp"
#include "config.hpp"

#include "zakai/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

struct Cli {
  std::string config_file;
  std::string obs_file;
  std::string out_file;
  int workers = 0;
  std::uint64_t seed = 0;
  bool has_obs = false;
  bool has_out = false;
  bool has_workers = false;
  bool has_seed = false;

  zakai::cli::CommandOptions options() const {
    zakai::cli::CommandOptions opts;
    if (has_obs) opts.obs_file = obs_file;
    if (has_out) opts.out_file = out_file;
    if (has_workers) opts.workers = workers;
    if (has_seed) opts.seed = seed;
    return opts;
  }
};

void add_common_options(CLI::App* cmd, Cli& cli, bool takes_obs) {
  cmd->add_option("--config", cli.config_file, "Run configuration file")
      ->required()
      ->check(CLI::ExistingFile);
  if (takes_obs) {
    cmd->add_option("--obs", cli.obs_file, "Observation path CSV (from `simulate`)")
        ->check(CLI::ExistingFile)
        ->each([&cli](const std::string&) { cli.has_obs = true; });
  }
  cmd->add_option("--out", cli.out_file, "Output file (overrides [output] path)")
      ->each([&cli](const std::string&) { cli.has_out = true; });
  cmd->add_option("--workers", cli.workers, "Worker threads (default 1)")
      ->each([&cli](const std::string&) { cli.has_workers = true; });
  cmd->add_option("--seed", cli.seed, "Seed (overrides [estimator] seed)")
      ->each([&cli](const std::string&) { cli.has_seed = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo estimation of nonlinear filtering densities"};
  app.require_subcommand(1);

  Cli cli;
  CLI::App* simulate = app.add_subcommand("simulate", "Draw a signal/observation realization");
  add_common_options(simulate, cli, false);
  CLI::App* estimate =
      app.add_subcommand("estimate", "Estimate the density at configured points");
  add_common_options(estimate, cli, true);
  CLI::App* grid = app.add_subcommand("grid", "Estimate the density over a point lattice");
  add_common_options(grid, cli, true);
  CLI::App* table =
      app.add_subcommand("table", "Per-dimension benchmark over fresh realizations");
  add_common_options(table, cli, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    const zakai::cli::RunConfig config = zakai::cli::parse_run_config_file(cli.config_file);
    const auto options = cli.options();
    if (simulate->parsed()) {
      zakai::cli::cmd_simulate(config, options, std::cout);
    } else if (estimate->parsed()) {
      zakai::cli::cmd_estimate(config, options, std::cout);
    } else if (grid->parsed()) {
      zakai::cli::cmd_grid(config, options, std::cout);
    } else if (table->parsed()) {
      zakai::cli::cmd_table(config, options, std::cout);
    }
    return 0;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const zakai::SimulationError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
