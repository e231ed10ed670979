#pragma once

#include "zakai/estimator.hpp"
#include "zakai/model.hpp"
#include "zakai/simulate.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace zakai::cli {

// Evaluation-point selection for estimate/grid runs.
struct PointsSpec {
  enum class Mode { kDefault, kExplicit, kGrid };

  struct Axis {
    int coord = 1;  // 1-based coordinate index
    double lo = 0.0;
    double hi = 0.0;
    int count = 1;
  };

  Mode mode = Mode::kDefault;
  std::vector<Vector> explicit_points;  // explicit mode
  std::vector<Axis> axes;               // grid mode, 1 or 2 axes
  bool origin_signal = true;            // axis values offset from the final signal
  bool frozen_signal = true;            // off-axis coordinates from the final signal

  bool operator==(const PointsSpec&) const;
};

struct TableSpec {
  std::vector<int> dims = {1, 2, 5, 10, 20, 25};
  int realizations = 5;

  bool operator==(const TableSpec&) const = default;
};

enum class OutputFormat { kCsv, kJson };

// Full run description: one config file drives every subcommand.
struct RunConfig {
  ExampleModelParams model;  // [model]; the example family is the only kind
  TimeGrid grid{0.5, 100};   // [grid]

  // Worker count is deliberately not part of the config: results are
  // worker-invariant and the count is a per-invocation --workers flag.
  struct Estimator {
    std::int64_t samples = 4'096'000;
    std::uint64_t seed = 1;
    std::int64_t chunk_size = 8192;
    AccumulationMode accumulation_mode = AccumulationMode::kLogSumExp;

    bool operator==(const Estimator&) const = default;
  } estimator;

  struct Output {
    OutputFormat format = OutputFormat::kCsv;
    std::string path;  // empty: require --out on the command line

    bool operator==(const Output&) const = default;
  } output;

  PointsSpec points;
  TableSpec table;

  bool operator==(const RunConfig&) const;
};

// Config parse/validation failure; the message carries source name and line.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Strict INI-style parser: unknown sections or keys, malformed values, and
// out-of-range parameters are all ConfigError with a line reference.
RunConfig parse_run_config(std::istream& in, const std::string& source_name);
RunConfig parse_run_config_file(const std::filesystem::path& file);

// Canonical serialization; parsing it back yields an equal RunConfig.
std::string serialize_run_config(const RunConfig& config);

// Recovers the RunConfig embedded as '#' comment lines in an output file
// (path CSV, estimates CSV, or table CSV). The embedded block starts at the
// first commented '[section]' line.
RunConfig parse_embedded_config_file(const std::filesystem::path& file);

}  // namespace zakai::cli
