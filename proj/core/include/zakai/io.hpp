#pragma once

#include "zakai/estimator.hpp"
#include "zakai/simulate.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace zakai {

// Ordered key/value pairs carried as '#'-prefixed comment lines in CSV files
// and as a string map in JSON output.
using MetadataList = std::vector<std::pair<std::string, std::string>>;

// Shortest decimal string that round-trips to the same double. All numeric
// file output goes through this, so files reload bit-exactly.
std::string format_double(double value);

// Strict parsers with contextual error messages (whole token must be consumed).
double parse_double(const std::string& token, const std::string& context);
std::int64_t parse_int(const std::string& token, const std::string& context);

// Path files: '#' metadata lines, then a header "n,t,Y_1..Y_d,Z_1..Z_k", then
// one row per time step. `comment_block` is emitted verbatim as additional
// '#'-prefixed lines (callers embed their run configuration there).
void write_path_csv(std::ostream& out, const SignalObservationPath& path,
                    const MetadataList& metadata, const std::string& comment_block = {});
void write_path_csv_file(const std::filesystem::path& file, const SignalObservationPath& path,
                         const MetadataList& metadata, const std::string& comment_block = {});

struct PathFileContents {
  SignalObservationPath path;
  MetadataList metadata;
};

PathFileContents read_path_csv(std::istream& in);
PathFileContents read_path_csv_file(const std::filesystem::path& file);

// Estimate files: '#' metadata lines, then "x_1..x_d,value,std_error,ci_lo,ci_hi",
// one row per evaluation point. Deliberately carries no timing so identical
// runs produce identical bytes.
void write_estimates_csv(std::ostream& out, int d, std::span<const Estimate> estimates,
                         const MetadataList& metadata, const std::string& comment_block = {});
void write_estimates_csv_file(const std::filesystem::path& file, int d,
                              std::span<const Estimate> estimates, const MetadataList& metadata,
                              const std::string& comment_block = {});

// JSON output mirrors the CSV fields, adds per-point diagnostics (samples,
// max_log_weight, degenerate_variance) and run metadata including wall time.
// `config_text` lands in the document as-is for round-trip parsing.
void write_estimates_json(std::ostream& out, int d, std::span<const Estimate> estimates,
                          const MetadataList& metadata, const std::string& config_text,
                          double wall_time_seconds);
void write_estimates_json_file(const std::filesystem::path& file, int d,
                               std::span<const Estimate> estimates, const MetadataList& metadata,
                               const std::string& config_text, double wall_time_seconds);

}  // namespace zakai
