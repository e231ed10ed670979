#pragma once

#include "config.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>

namespace zakai::cli {

// Command-line overrides applied on top of the config file.
struct CommandOptions {
  std::optional<std::filesystem::path> obs_file;
  std::optional<std::filesystem::path> out_file;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
};

// Each command throws on failure (std::invalid_argument for validation,
// SimulationError / std::runtime_error for numeric or I/O trouble); main()
// translates exception type to exit code. `info` receives the human-readable
// summary; file output goes to --out or the config's output path.

// Draws one signal/observation realization and writes it as a path CSV.
void cmd_simulate(const RunConfig& config, const CommandOptions& options, std::ostream& info);

// Estimates the unnormalized density at the configured points.
void cmd_estimate(const RunConfig& config, const CommandOptions& options, std::ostream& info);

// Estimates over a 1- or 2-axis lattice of points around the final signal.
void cmd_grid(const RunConfig& config, const CommandOptions& options, std::ostream& info);

// Benchmark workflow: per dimension, several independent realizations, each
// estimated at the final signal and at the naive location, with timings.
void cmd_table(const RunConfig& config, const CommandOptions& options, std::ostream& info);

}  // namespace zakai::cli
