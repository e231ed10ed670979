#include "zakai/io.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace zakai {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::ofstream open_output(const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + file.string());
  }
  return out;
}

void write_metadata(std::ostream& out, const MetadataList& metadata) {
  for (const auto& [key, value] : metadata) {
    out << "# " << key << " = " << value << "\n";
  }
}

// Each non-empty line of `block` becomes a '#' comment line.
void write_comment_block(std::ostream& out, const std::string& block) {
  std::istringstream stream(block);
  std::string line;
  while (std::getline(stream, line)) {
    if (!line.empty()) out << "# " << line << "\n";
  }
}

nlohmann::json estimate_to_json(int d, const Estimate& est) {
  nlohmann::json point = nlohmann::json::array();
  for (int i = 0; i < d; ++i) point.push_back(est.x(i));
  return nlohmann::json{{"x", std::move(point)},
                        {"value", est.value},
                        {"std_error", est.std_error},
                        {"ci_lo", est.ci_lo},
                        {"ci_hi", est.ci_hi},
                        {"samples", est.samples},
                        {"max_log_weight", est.max_log_weight},
                        {"degenerate_variance", est.degenerate_variance}};
}

}  // namespace

std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

double parse_double(const std::string& token, const std::string& context) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw std::invalid_argument(context + ": expected a number, got '" + token + "'");
  }
  return value;
}

std::int64_t parse_int(const std::string& token, const std::string& context) {
  std::int64_t value = 0;
  const char* begin = token.data();
  const char* end = begin + token.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || result.ptr != end) {
    throw std::invalid_argument(context + ": expected an integer, got '" + token + "'");
  }
  return value;
}

void write_path_csv(std::ostream& out, const SignalObservationPath& path,
                    const MetadataList& metadata, const std::string& comment_block) {
  const int steps = path.grid.steps;
  const auto d = path.signal.cols();
  const auto k = path.observation.cols();

  write_metadata(out, metadata);
  write_comment_block(out, comment_block);
  out << "n,t";
  for (int j = 1; j <= d; ++j) out << ",Y_" << j;
  for (int j = 1; j <= k; ++j) out << ",Z_" << j;
  out << "\n";
  for (int n = 0; n <= steps; ++n) {
    out << n << "," << format_double(path.grid.time(n));
    for (int j = 0; j < d; ++j) out << "," << format_double(path.signal(n, j));
    for (int j = 0; j < k; ++j) out << "," << format_double(path.observation(n, j));
    out << "\n";
  }
}

void write_path_csv_file(const std::filesystem::path& file, const SignalObservationPath& path,
                         const MetadataList& metadata, const std::string& comment_block) {
  auto out = open_output(file);
  write_path_csv(out, path, metadata, comment_block);
}

PathFileContents read_path_csv(std::istream& in) {
  PathFileContents contents;
  std::string line;
  bool have_header = false;
  int d = 0;
  int k = 0;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        const auto trim = [](std::string& s) {
          const auto first = s.find_first_not_of(" \t");
          const auto last = s.find_last_not_of(" \t");
          s = (first == std::string::npos) ? std::string() : s.substr(first, last - first + 1);
        };
        trim(key);
        trim(value);
        contents.metadata.emplace_back(std::move(key), std::move(value));
      }
      continue;
    }
    if (!have_header) {
      const auto fields = split_csv_line(line);
      if (fields.size() < 4 || fields[0] != "n" || fields[1] != "t") {
        throw std::invalid_argument("path csv: malformed header '" + line + "'");
      }
      for (std::size_t i = 2; i < fields.size(); ++i) {
        if (fields[i].rfind("Y_", 0) == 0) {
          if (k > 0) throw std::invalid_argument("path csv: Y column after Z columns");
          ++d;
        } else if (fields[i].rfind("Z_", 0) == 0) {
          ++k;
        } else {
          throw std::invalid_argument("path csv: unexpected column '" + fields[i] + "'");
        }
      }
      if (d == 0 || k == 0) {
        throw std::invalid_argument("path csv: header must contain Y_ and Z_ columns");
      }
      have_header = true;
      continue;
    }
    const auto fields = split_csv_line(line);
    if (fields.size() != static_cast<std::size_t>(2 + d + k)) {
      throw std::invalid_argument("path csv: row has " + std::to_string(fields.size()) +
                                  " fields, expected " + std::to_string(2 + d + k));
    }
    const auto n = parse_int(fields[0], "path csv: step index");
    if (n != static_cast<std::int64_t>(rows.size())) {
      throw std::invalid_argument("path csv: non-contiguous step index " + fields[0]);
    }
    std::vector<double> row;
    row.reserve(fields.size() - 1);
    for (std::size_t i = 1; i < fields.size(); ++i) {
      row.push_back(parse_double(fields[i], "path csv: row " + fields[0]));
    }
    rows.push_back(std::move(row));
  }
  if (!have_header || rows.size() < 2) {
    throw std::invalid_argument("path csv: need a header and at least two rows");
  }

  const int steps = static_cast<int>(rows.size()) - 1;
  contents.path.grid.steps = steps;
  contents.path.grid.horizon = rows.back()[0];  // t of the final row
  contents.path.signal.resize(steps + 1, d);
  contents.path.observation.resize(steps + 1, k);
  for (int n = 0; n <= steps; ++n) {
    for (int j = 0; j < d; ++j) contents.path.signal(n, j) = rows[n][1 + j];
    for (int j = 0; j < k; ++j) contents.path.observation(n, j) = rows[n][1 + d + j];
  }
  return contents;
}

PathFileContents read_path_csv_file(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw std::runtime_error("cannot open path file: " + file.string());
  }
  return read_path_csv(in);
}

void write_estimates_csv(std::ostream& out, int d, std::span<const Estimate> estimates,
                         const MetadataList& metadata, const std::string& comment_block) {
  write_metadata(out, metadata);
  write_comment_block(out, comment_block);
  for (int j = 1; j <= d; ++j) out << (j > 1 ? "," : "") << "x_" << j;
  out << ",value,std_error,ci_lo,ci_hi\n";
  for (const Estimate& est : estimates) {
    for (int j = 0; j < d; ++j) out << (j > 0 ? "," : "") << format_double(est.x(j));
    out << "," << format_double(est.value) << "," << format_double(est.std_error) << ","
        << format_double(est.ci_lo) << "," << format_double(est.ci_hi) << "\n";
  }
}

void write_estimates_csv_file(const std::filesystem::path& file, int d,
                              std::span<const Estimate> estimates, const MetadataList& metadata,
                              const std::string& comment_block) {
  auto out = open_output(file);
  write_estimates_csv(out, d, estimates, metadata, comment_block);
}

void write_estimates_json(std::ostream& out, int d, std::span<const Estimate> estimates,
                          const MetadataList& metadata, const std::string& config_text,
                          double wall_time_seconds) {
  nlohmann::json doc;
  nlohmann::json meta = nlohmann::json::object();
  for (const auto& [key, value] : metadata) meta[key] = value;
  doc["metadata"] = std::move(meta);
  if (!config_text.empty()) doc["config"] = config_text;
  doc["wall_time_seconds"] = wall_time_seconds;
  nlohmann::json rows = nlohmann::json::array();
  for (const Estimate& est : estimates) rows.push_back(estimate_to_json(d, est));
  doc["estimates"] = std::move(rows);
  out << doc.dump(2) << "\n";
}

void write_estimates_json_file(const std::filesystem::path& file, int d,
                               std::span<const Estimate> estimates, const MetadataList& metadata,
                               const std::string& config_text, double wall_time_seconds) {
  auto out = open_output(file);
  write_estimates_json(out, d, estimates, metadata, config_text, wall_time_seconds);
}

}  // namespace zakai
