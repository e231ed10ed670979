#include "commands.hpp"

#include "zakai/estimator.hpp"
#include "zakai/io.hpp"
#include "zakai/simulate.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace zakai::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::filesystem::path resolve_output_path(const RunConfig& config,
                                          const CommandOptions& options) {
  if (options.out_file) return *options.out_file;
  if (!config.output.path.empty()) return config.output.path;
  throw std::invalid_argument("no output path: pass --out or set [output] path");
}

RunConfig apply_overrides(RunConfig config, const CommandOptions& options) {
  if (options.seed) config.estimator.seed = *options.seed;
  return config;
}

int resolve_workers(const CommandOptions& options) {
  const int workers = options.workers.value_or(1);
  if (workers < 1) throw std::invalid_argument("--workers must be >= 1");
  return workers;
}

std::string format_point(const Vector& x) {
  std::ostringstream out;
  out << "(";
  for (int i = 0; i < x.size(); ++i) out << (i > 0 ? ", " : "") << format_double(x(i));
  out << ")";
  return out.str();
}

// Quick-reference keys duplicated from the config for greppability; the full
// canonical config is embedded below them and is the machine-readable source.
MetadataList summary_metadata(const RunConfig& config) {
  return {{"kind", "example"},
          {"d", std::to_string(config.model.d)},
          {"k", std::to_string(config.model.d)},
          {"T", format_double(config.grid.horizon)},
          {"N", std::to_string(config.grid.steps)},
          {"M", std::to_string(config.estimator.samples)},
          {"seed", std::to_string(config.estimator.seed)}};
}

// Loads an observation file and checks it against the config's model/grid.
SignalObservationPath load_observation(const RunConfig& config, const CommandOptions& options) {
  if (!options.obs_file) {
    throw std::invalid_argument("this command needs --obs <path csv>");
  }
  PathFileContents contents = read_path_csv_file(*options.obs_file);
  const auto& path = contents.path;
  if (path.signal.cols() != config.model.d || path.observation.cols() != config.model.d) {
    throw std::invalid_argument(
        "observation file dimensions (d = " + std::to_string(path.signal.cols()) +
        ", k = " + std::to_string(path.observation.cols()) +
        ") do not match config d = " + std::to_string(config.model.d));
  }
  if (path.grid.steps != config.grid.steps) {
    throw std::invalid_argument("observation file has N = " + std::to_string(path.grid.steps) +
                                ", config has N = " + std::to_string(config.grid.steps));
  }
  if (path.grid.horizon != config.grid.horizon) {
    throw std::invalid_argument("observation file has T = " + format_double(path.grid.horizon) +
                                ", config has T = " + format_double(config.grid.horizon));
  }
  return contents.path;
}

Vector final_signal(const SignalObservationPath& obs) {
  return obs.signal.row(obs.grid.steps);
}

// Observation-implied location Z_final / (gamma * T): where the sensor alone
// suggests the signal sits. Undefined when gamma * T == 0.
Vector naive_location(const RunConfig& config, const SignalObservationPath& obs) {
  const double scale = config.model.gamma * obs.grid.horizon;
  if (scale == 0.0) {
    throw std::invalid_argument(
        "default points need gamma * T != 0; configure [points] explicitly");
  }
  return Vector(obs.observation.row(obs.grid.steps)) / scale;
}

std::vector<Vector> default_points(const RunConfig& config, const SignalObservationPath& obs) {
  return {final_signal(obs), naive_location(config, obs)};
}

std::vector<double> axis_values(const PointsSpec::Axis& axis) {
  std::vector<double> values;
  values.reserve(axis.count);
  if (axis.count == 1) {
    values.push_back(axis.lo);
    return values;
  }
  for (int i = 0; i < axis.count; ++i) {
    values.push_back(axis.lo + (axis.hi - axis.lo) * i / (axis.count - 1));
  }
  return values;
}

// Expands the grid spec into points, axis1 outer / axis2 inner (row-major).
std::vector<Vector> expand_grid_points(const PointsSpec& spec, int d,
                                       const SignalObservationPath& obs) {
  const Vector y_final = final_signal(obs);
  const Vector base = spec.frozen_signal ? y_final : Vector(Vector::Zero(d));
  const Vector origin = spec.origin_signal ? y_final : Vector(Vector::Zero(d));

  std::vector<Vector> points;
  const auto& a1 = spec.axes[0];
  const auto v1 = axis_values(a1);
  if (spec.axes.size() == 1) {
    points.reserve(v1.size());
    for (const double v : v1) {
      Vector x = base;
      x(a1.coord - 1) = origin(a1.coord - 1) + v;
      points.push_back(std::move(x));
    }
    return points;
  }
  const auto& a2 = spec.axes[1];
  const auto v2 = axis_values(a2);
  points.reserve(v1.size() * v2.size());
  for (const double u : v1) {
    for (const double v : v2) {
      Vector x = base;
      x(a1.coord - 1) = origin(a1.coord - 1) + u;
      x(a2.coord - 1) = origin(a2.coord - 1) + v;
      points.push_back(x);
    }
  }
  return points;
}

EstimatorConfig estimator_config(const RunConfig& config, int workers) {
  EstimatorConfig est;
  est.samples = config.estimator.samples;
  est.seed = config.estimator.seed;
  est.chunk_size = config.estimator.chunk_size;
  est.accumulation_mode = config.estimator.accumulation_mode;
  est.workers = workers;
  return est;
}

void write_estimates_output(const RunConfig& config, const CommandOptions& options,
                            const std::vector<Estimate>& estimates, const MetadataList& metadata,
                            double wall_time_seconds) {
  const auto out_path = resolve_output_path(config, options);
  const std::string config_text = serialize_run_config(config);
  if (config.output.format == OutputFormat::kCsv) {
    write_estimates_csv_file(out_path, config.model.d, estimates, metadata, config_text);
  } else {
    write_estimates_json_file(out_path, config.model.d, estimates, metadata, config_text,
                              wall_time_seconds);
  }
}

void print_estimates(std::ostream& info, const std::vector<Estimate>& estimates) {
  for (const Estimate& est : estimates) {
    info << "x = " << format_point(est.x) << "  value = " << format_double(est.value)
         << "  std_error = " << format_double(est.std_error) << "  ci = ["
         << format_double(est.ci_lo) << ", " << format_double(est.ci_hi) << "]\n";
  }
}

void run_estimate_like(const char* command, const RunConfig& raw_config,
                       const CommandOptions& options, std::ostream& info) {
  const RunConfig config = apply_overrides(raw_config, options);
  const int workers = resolve_workers(options);
  const FilteringModel model = build_example_model(config.model);
  const SignalObservationPath obs = load_observation(config, options);

  std::vector<Vector> points;
  MetadataList metadata;
  metadata.emplace_back("command", command);
  if (std::string(command) == "grid") {
    if (config.points.mode != PointsSpec::Mode::kGrid) {
      throw std::invalid_argument("the grid command needs [points] mode = grid");
    }
    points = expand_grid_points(config.points, config.model.d, obs);
    for (std::size_t i = 0; i < config.points.axes.size(); ++i) {
      const auto& axis = config.points.axes[i];
      metadata.emplace_back("axis" + std::to_string(i + 1),
                            std::to_string(axis.coord) + " " + format_double(axis.lo) + " " +
                                format_double(axis.hi) + " " + std::to_string(axis.count));
    }
    metadata.emplace_back("origin", config.points.origin_signal ? "signal" : "zero");
    metadata.emplace_back("frozen", config.points.frozen_signal ? "signal" : "zero");
    metadata.emplace_back("points", std::to_string(points.size()));
  } else {
    switch (config.points.mode) {
      case PointsSpec::Mode::kDefault:
        points = default_points(config, obs);
        metadata.emplace_back("points", "default");
        break;
      case PointsSpec::Mode::kExplicit:
        points = config.points.explicit_points;
        metadata.emplace_back("points", "explicit " + std::to_string(points.size()));
        break;
      case PointsSpec::Mode::kGrid:
        throw std::invalid_argument("[points] mode = grid: use the grid command");
    }
  }

  const auto summary = summary_metadata(config);
  metadata.insert(metadata.end(), summary.begin(), summary.end());

  const auto start = Clock::now();
  const std::vector<Estimate> estimates =
      estimate_grid(model, obs, points, estimator_config(config, workers));
  const double elapsed = seconds_since(start);

  write_estimates_output(config, options, estimates, metadata, elapsed);
  print_estimates(info, estimates);
  info << "estimated " << points.size() << " point(s), " << config.estimator.samples
       << " samples each, in " << format_double(elapsed) << " s\n";
}

}  // namespace

void cmd_simulate(const RunConfig& raw_config, const CommandOptions& options,
                  std::ostream& info) {
  const RunConfig config = apply_overrides(raw_config, options);
  const FilteringModel model = build_example_model(config.model);

  const auto factory = philox_stream_factory(config.estimator.seed);
  const SignalObservationPath path =
      simulate_signal_observation(model, config.grid, config.model.alpha, factory);

  MetadataList metadata;
  metadata.emplace_back("command", "simulate");
  const auto summary = summary_metadata(config);
  metadata.insert(metadata.end(), summary.begin(), summary.end());
  write_path_csv_file(resolve_output_path(config, options), path, metadata,
                      serialize_run_config(config));

  info << "final signal Y_N = " << format_point(final_signal(path)) << "\n";
  if (config.model.gamma * config.grid.horizon != 0.0) {
    info << "naive location Z_N / (gamma T) = "
         << format_point(naive_location(config, path)) << "\n";
  }
}

void cmd_estimate(const RunConfig& config, const CommandOptions& options, std::ostream& info) {
  run_estimate_like("estimate", config, options, info);
}

void cmd_grid(const RunConfig& config, const CommandOptions& options, std::ostream& info) {
  run_estimate_like("grid", config, options, info);
}

void cmd_table(const RunConfig& raw_config, const CommandOptions& options, std::ostream& info) {
  const RunConfig config = apply_overrides(raw_config, options);
  const int workers = resolve_workers(options);
  if (config.model.gamma * config.grid.horizon == 0.0) {
    throw std::invalid_argument("table needs gamma * T != 0 (its points are Y_N and Z_N/(gamma T))");
  }

  // One row per realization, both evaluation points side by side (the shape of
  // a published benchmark table); avg_seconds is the per-dimension mean over
  // all timed estimate calls, repeated on each of its rows.
  struct Row {
    int d = 0;
    int realization = 0;
    std::uint64_t seed = 0;
    Estimate signal_est;
    Estimate naive_est;
    double seconds_signal = 0.0;
    double seconds_naive = 0.0;
    double avg_seconds = 0.0;  // filled after the dimension finishes
  };
  struct DimSummary {
    int d = 0;
    double avg_seconds = 0.0;
  };
  std::vector<Row> rows;
  std::vector<DimSummary> summaries;

  for (const int dim : config.table.dims) {
    RunConfig dim_config = config;
    dim_config.model.d = dim;
    const FilteringModel model = build_example_model(dim_config.model);

    const std::size_t dim_first_row = rows.size();
    double total_seconds = 0.0;
    int timed_estimates = 0;
    for (int r = 0; r < config.table.realizations; ++r) {
      const std::uint64_t seed = config.estimator.seed + static_cast<std::uint64_t>(r);
      const SignalObservationPath obs = simulate_signal_observation(
          model, config.grid, dim_config.model.alpha, philox_stream_factory(seed));

      EstimatorConfig est = estimator_config(dim_config, workers);
      est.seed = seed;
      Row row;
      row.d = dim;
      row.realization = r;
      row.seed = seed;

      auto start = Clock::now();
      row.signal_est = estimate_point(model, obs, final_signal(obs), est);
      row.seconds_signal = seconds_since(start);

      start = Clock::now();
      row.naive_est = estimate_point(model, obs, naive_location(dim_config, obs), est);
      row.seconds_naive = seconds_since(start);

      total_seconds += row.seconds_signal + row.seconds_naive;
      timed_estimates += 2;
      rows.push_back(std::move(row));
    }
    const double avg = total_seconds / timed_estimates;
    for (std::size_t i = dim_first_row; i < rows.size(); ++i) rows[i].avg_seconds = avg;
    summaries.push_back(DimSummary{dim, avg});
    info << "d = " << dim << ": " << config.table.realizations
         << " realizations, avg estimate time " << format_double(avg) << " s\n";
  }

  MetadataList metadata;
  metadata.emplace_back("command", "table");
  metadata.emplace_back("realizations", std::to_string(config.table.realizations));
  for (const auto& summary : summaries) {
    metadata.emplace_back("avg_seconds_d" + std::to_string(summary.d),
                          format_double(summary.avg_seconds));
  }
  const std::string config_text = serialize_run_config(config);

  const auto out_path = resolve_output_path(config, options);
  if (config.output.format == OutputFormat::kCsv) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path.string());
    for (const auto& [key, value] : metadata) out << "# " << key << " = " << value << "\n";
    std::istringstream cfg_stream(config_text);
    std::string cfg_line;
    while (std::getline(cfg_stream, cfg_line)) {
      if (!cfg_line.empty()) out << "# " << cfg_line << "\n";
    }
    out << "d,realization,seed,value_signal,std_error_signal,ci_lo_signal,ci_hi_signal,"
           "value_naive,std_error_naive,ci_lo_naive,ci_hi_naive,avg_seconds\n";
    for (const Row& row : rows) {
      out << row.d << "," << row.realization << "," << row.seed << ","
          << format_double(row.signal_est.value) << "," << format_double(row.signal_est.std_error)
          << "," << format_double(row.signal_est.ci_lo) << ","
          << format_double(row.signal_est.ci_hi) << "," << format_double(row.naive_est.value)
          << "," << format_double(row.naive_est.std_error) << ","
          << format_double(row.naive_est.ci_lo) << "," << format_double(row.naive_est.ci_hi)
          << "," << format_double(row.avg_seconds) << "\n";
    }
  } else {
    const auto estimate_json = [](const Estimate& e) {
      nlohmann::json x = nlohmann::json::array();
      for (int i = 0; i < e.x.size(); ++i) x.push_back(e.x(i));
      return nlohmann::json{{"x", std::move(x)},
                            {"value", e.value},
                            {"std_error", e.std_error},
                            {"ci_lo", e.ci_lo},
                            {"ci_hi", e.ci_hi}};
    };
    nlohmann::json doc;
    nlohmann::json meta = nlohmann::json::object();
    for (const auto& [key, value] : metadata) meta[key] = value;
    doc["metadata"] = std::move(meta);
    doc["config"] = config_text;
    nlohmann::json dims = nlohmann::json::array();
    for (const auto& summary : summaries) {
      nlohmann::json runs = nlohmann::json::array();
      for (const Row& row : rows) {
        if (row.d != summary.d) continue;
        runs.push_back({{"realization", row.realization},
                        {"seed", row.seed},
                        {"signal", estimate_json(row.signal_est)},
                        {"naive", estimate_json(row.naive_est)},
                        {"seconds_signal", row.seconds_signal},
                        {"seconds_naive", row.seconds_naive}});
      }
      dims.push_back(
          {{"d", summary.d}, {"avg_seconds", summary.avg_seconds}, {"runs", std::move(runs)}});
    }
    doc["dimensions"] = std::move(dims);
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot open output file: " + out_path.string());
    out << doc.dump(2) << "\n";
  }
}

}  // namespace zakai::cli
