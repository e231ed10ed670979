#include "config.hpp"

#include "zakai/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace zakai::cli {

bool PointsSpec::operator==(const PointsSpec& other) const {
  if (mode != other.mode || origin_signal != other.origin_signal ||
      frozen_signal != other.frozen_signal) {
    return false;
  }
  if (explicit_points.size() != other.explicit_points.size()) return false;
  for (std::size_t i = 0; i < explicit_points.size(); ++i) {
    if (explicit_points[i] != other.explicit_points[i]) return false;
  }
  if (axes.size() != other.axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    const Axis& a = axes[i];
    const Axis& b = other.axes[i];
    if (a.coord != b.coord || a.lo != b.lo || a.hi != b.hi || a.count != b.count) return false;
  }
  return true;
}

bool RunConfig::operator==(const RunConfig& other) const {
  return model.d == other.model.d && model.alpha == other.model.alpha &&
         model.beta == other.model.beta && model.gamma == other.model.gamma &&
         grid.horizon == other.grid.horizon && grid.steps == other.grid.steps &&
         estimator == other.estimator && output == other.output && points == other.points &&
         table == other.table;
}

namespace {

struct ParseContext {
  std::string source;
  int line_no = 0;

  [[noreturn]] void fail(const std::string& message) const {
    throw ConfigError(source + ":" + std::to_string(line_no) + ": " + message);
  }
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_ws(const std::string& s) {
  std::vector<std::string> tokens;
  std::istringstream stream(s);
  std::string token;
  while (stream >> token) tokens.push_back(token);
  return tokens;
}

double parse_double_cfg(const ParseContext& ctx, const std::string& key,
                        const std::string& token) {
  try {
    return parse_double(token, key);
  } catch (const std::invalid_argument& e) {
    ctx.fail(e.what());
  }
}

std::int64_t parse_int_cfg(const ParseContext& ctx, const std::string& key,
                           const std::string& token) {
  try {
    return parse_int(token, key);
  } catch (const std::invalid_argument& e) {
    ctx.fail(e.what());
  }
}

std::uint64_t parse_uint64_cfg(const ParseContext& ctx, const std::string& key,
                               const std::string& token) {
  std::uint64_t value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    ctx.fail(key + ": expected an unsigned integer, got '" + token + "'");
  }
  return value;
}

}  // namespace

RunConfig parse_run_config(std::istream& in, const std::string& source_name) {
  RunConfig config;
  ParseContext ctx{source_name, 0};
  std::string section;
  std::set<std::string> seen_keys;  // "section/key", to reject duplicates
  bool table_dims_set = false;

  const std::set<std::string> known_sections = {"model",  "grid",   "estimator",
                                                "output", "points", "table"};

  std::string line;
  while (std::getline(in, line)) {
    ++ctx.line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#' || stripped.front() == ';') continue;

    if (stripped.front() == '[') {
      if (stripped.back() != ']') ctx.fail("malformed section header '" + stripped + "'");
      section = trim(stripped.substr(1, stripped.size() - 2));
      if (!known_sections.count(section)) ctx.fail("unknown section [" + section + "]");
      continue;
    }

    const auto eq = stripped.find('=');
    if (eq == std::string::npos) ctx.fail("expected 'key = value', got '" + stripped + "'");
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) ctx.fail("empty key");
    if (section.empty()) ctx.fail("key '" + key + "' appears before any section");

    // `point` may repeat (one evaluation point per line); everything else may not.
    if (key != "point" && !seen_keys.insert(section + "/" + key).second) {
      ctx.fail("duplicate key '" + key + "' in [" + section + "]");
    }

    if (section == "model") {
      if (key == "kind") {
        if (value != "example") ctx.fail("unknown model kind '" + value + "'");
      } else if (key == "d") {
        const auto d = parse_int_cfg(ctx, key, value);
        if (d < 1) ctx.fail("d must be >= 1");
        config.model.d = static_cast<int>(d);
      } else if (key == "alpha") {
        config.model.alpha = parse_double_cfg(ctx, key, value);
        if (!(config.model.alpha > 0.0)) ctx.fail("alpha must be > 0");
      } else if (key == "beta") {
        config.model.beta = parse_double_cfg(ctx, key, value);
      } else if (key == "gamma") {
        config.model.gamma = parse_double_cfg(ctx, key, value);
      } else {
        ctx.fail("unknown key '" + key + "' in [model]");
      }
    } else if (section == "grid") {
      if (key == "T") {
        config.grid.horizon = parse_double_cfg(ctx, key, value);
        if (!(config.grid.horizon > 0.0)) ctx.fail("T must be > 0");
      } else if (key == "N") {
        const auto n = parse_int_cfg(ctx, key, value);
        if (n < 1) ctx.fail("N must be >= 1");
        config.grid.steps = static_cast<int>(n);
      } else {
        ctx.fail("unknown key '" + key + "' in [grid]");
      }
    } else if (section == "estimator") {
      if (key == "M") {
        config.estimator.samples = parse_int_cfg(ctx, key, value);
        if (config.estimator.samples < 2) ctx.fail("M must be >= 2");
      } else if (key == "seed") {
        config.estimator.seed = parse_uint64_cfg(ctx, key, value);
      } else if (key == "chunk_size") {
        config.estimator.chunk_size = parse_int_cfg(ctx, key, value);
        if (config.estimator.chunk_size < 1) ctx.fail("chunk_size must be >= 1");
      } else if (key == "accumulation_mode") {
        if (value == "log-sum-exp") {
          config.estimator.accumulation_mode = AccumulationMode::kLogSumExp;
        } else if (value == "plain") {
          config.estimator.accumulation_mode = AccumulationMode::kPlain;
        } else {
          ctx.fail("accumulation_mode must be 'log-sum-exp' or 'plain'");
        }
      } else {
        ctx.fail("unknown key '" + key + "' in [estimator]");
      }
    } else if (section == "output") {
      if (key == "format") {
        if (value == "csv") {
          config.output.format = OutputFormat::kCsv;
        } else if (value == "json") {
          config.output.format = OutputFormat::kJson;
        } else {
          ctx.fail("format must be 'csv' or 'json'");
        }
      } else if (key == "path") {
        config.output.path = value;
      } else {
        ctx.fail("unknown key '" + key + "' in [output]");
      }
    } else if (section == "points") {
      if (key == "mode") {
        if (value == "default") {
          config.points.mode = PointsSpec::Mode::kDefault;
        } else if (value == "explicit") {
          config.points.mode = PointsSpec::Mode::kExplicit;
        } else if (value == "grid") {
          config.points.mode = PointsSpec::Mode::kGrid;
        } else {
          ctx.fail("points mode must be 'default', 'explicit', or 'grid'");
        }
      } else if (key == "point") {
        const auto tokens = split_ws(value);
        if (tokens.empty()) ctx.fail("point needs at least one coordinate");
        Vector x(tokens.size());
        for (std::size_t i = 0; i < tokens.size(); ++i) {
          x(static_cast<int>(i)) = parse_double_cfg(ctx, key, tokens[i]);
        }
        config.points.explicit_points.push_back(std::move(x));
      } else if (key == "axis1" || key == "axis2") {
        const auto tokens = split_ws(value);
        if (tokens.size() != 4) ctx.fail(key + " needs 'coord lo hi count'");
        PointsSpec::Axis axis;
        axis.coord = static_cast<int>(parse_int_cfg(ctx, key, tokens[0]));
        axis.lo = parse_double_cfg(ctx, key, tokens[1]);
        axis.hi = parse_double_cfg(ctx, key, tokens[2]);
        axis.count = static_cast<int>(parse_int_cfg(ctx, key, tokens[3]));
        if (axis.coord < 1) ctx.fail("axis coordinate index must be >= 1");
        if (axis.count < 1) ctx.fail("axis count must be >= 1");
        if (axis.count > 1 && !(axis.hi > axis.lo)) ctx.fail("axis needs hi > lo");
        if (key == "axis1") {
          if (!config.points.axes.empty()) ctx.fail("axis1 must come before axis2");
          config.points.axes.push_back(axis);
        } else {
          if (config.points.axes.size() != 1) ctx.fail("axis2 requires a preceding axis1");
          config.points.axes.push_back(axis);
        }
      } else if (key == "origin") {
        if (value == "signal") {
          config.points.origin_signal = true;
        } else if (value == "zero") {
          config.points.origin_signal = false;
        } else {
          ctx.fail("origin must be 'signal' or 'zero'");
        }
      } else if (key == "frozen") {
        if (value == "signal") {
          config.points.frozen_signal = true;
        } else if (value == "zero") {
          config.points.frozen_signal = false;
        } else {
          ctx.fail("frozen must be 'signal' or 'zero'");
        }
      } else {
        ctx.fail("unknown key '" + key + "' in [points]");
      }
    } else if (section == "table") {
      if (key == "dims") {
        const auto tokens = split_ws(value);
        if (tokens.empty()) ctx.fail("dims needs at least one dimension");
        std::vector<int> dims;
        for (const auto& token : tokens) {
          const auto dim = parse_int_cfg(ctx, key, token);
          if (dim < 1) ctx.fail("dims entries must be >= 1");
          dims.push_back(static_cast<int>(dim));
        }
        config.table.dims = std::move(dims);
        table_dims_set = true;
      } else if (key == "realizations") {
        const auto r = parse_int_cfg(ctx, key, value);
        if (r < 1) ctx.fail("realizations must be >= 1");
        config.table.realizations = static_cast<int>(r);
      } else {
        ctx.fail("unknown key '" + key + "' in [table]");
      }
    }
  }

  // Cross-field validation (line numbers no longer apply).
  ctx.line_no = 0;
  for (const Vector& x : config.points.explicit_points) {
    if (x.size() != config.model.d) {
      throw ConfigError(source_name + ": explicit point has " + std::to_string(x.size()) +
                        " coordinates, model d = " + std::to_string(config.model.d));
    }
  }
  if (config.points.mode == PointsSpec::Mode::kExplicit &&
      config.points.explicit_points.empty()) {
    throw ConfigError(source_name + ": points mode 'explicit' needs at least one point");
  }
  if (config.points.mode == PointsSpec::Mode::kGrid && config.points.axes.empty()) {
    throw ConfigError(source_name + ": points mode 'grid' needs axis1 (and optionally axis2)");
  }
  if (config.points.axes.size() == 2 &&
      config.points.axes[0].coord == config.points.axes[1].coord) {
    throw ConfigError(source_name + ": axis1 and axis2 must use distinct coordinates");
  }
  for (const auto& axis : config.points.axes) {
    if (axis.coord > config.model.d) {
      throw ConfigError(source_name + ": axis coordinate " + std::to_string(axis.coord) +
                        " exceeds model d = " + std::to_string(config.model.d));
    }
  }
  (void)table_dims_set;
  return config;
}

RunConfig parse_run_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open config file: " + file.string());
  }
  return parse_run_config(in, file.string());
}

RunConfig parse_embedded_config_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open file: " + file.string());
  }
  std::string line;
  std::ostringstream embedded;
  bool in_config = false;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) != 0) continue;
    std::string body = trim(line.substr(1));
    if (!in_config) {
      if (!body.empty() && body.front() == '[') in_config = true;
    }
    if (in_config) embedded << body << "\n";
  }
  if (!in_config) {
    throw std::invalid_argument(file.string() + ": no embedded config block found");
  }
  std::istringstream stream(embedded.str());
  return parse_run_config(stream, file.string() + " (embedded config)");
}

std::string serialize_run_config(const RunConfig& config) {
  std::ostringstream out;
  out << "[model]\n"
      << "kind = example\n"
      << "d = " << config.model.d << "\n"
      << "alpha = " << format_double(config.model.alpha) << "\n"
      << "beta = " << format_double(config.model.beta) << "\n"
      << "gamma = " << format_double(config.model.gamma) << "\n\n";
  out << "[grid]\n"
      << "T = " << format_double(config.grid.horizon) << "\n"
      << "N = " << config.grid.steps << "\n\n";
  out << "[estimator]\n"
      << "M = " << config.estimator.samples << "\n"
      << "seed = " << config.estimator.seed << "\n"
      << "chunk_size = " << config.estimator.chunk_size << "\n"
      << "accumulation_mode = "
      << (config.estimator.accumulation_mode == AccumulationMode::kLogSumExp ? "log-sum-exp"
                                                                             : "plain")
      << "\n\n";
  out << "[output]\n"
      << "format = " << (config.output.format == OutputFormat::kCsv ? "csv" : "json") << "\n";
  if (!config.output.path.empty()) out << "path = " << config.output.path << "\n";
  out << "\n[points]\n";
  switch (config.points.mode) {
    case PointsSpec::Mode::kDefault:
      out << "mode = default\n";
      break;
    case PointsSpec::Mode::kExplicit:
      out << "mode = explicit\n";
      break;
    case PointsSpec::Mode::kGrid:
      out << "mode = grid\n";
      break;
  }
  for (const Vector& x : config.points.explicit_points) {
    out << "point =";
    for (int i = 0; i < x.size(); ++i) out << " " << format_double(x(i));
    out << "\n";
  }
  for (std::size_t i = 0; i < config.points.axes.size(); ++i) {
    const auto& axis = config.points.axes[i];
    out << "axis" << (i + 1) << " = " << axis.coord << " " << format_double(axis.lo) << " "
        << format_double(axis.hi) << " " << axis.count << "\n";
  }
  out << "origin = " << (config.points.origin_signal ? "signal" : "zero") << "\n";
  out << "frozen = " << (config.points.frozen_signal ? "signal" : "zero") << "\n";
  out << "\n[table]\ndims =";
  for (const int dim : config.table.dims) out << " " << dim;
  out << "\nrealizations = " << config.table.realizations << "\n";
  return out.str();
}

}  // namespace zakai::cli
