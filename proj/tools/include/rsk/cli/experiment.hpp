#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rsk/domain.hpp"
#include "rsk/noise.hpp"

namespace rsk::cli {

using Json = nlohmann::ordered_json;

inline const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names{"noise-check", "lt-scaling", "trace", "variance-scan",
                                              "spectrum",    "airy",       "report"};
  return names;
}

/// Validated run description. `echo` is the fully resolved configuration
/// (defaults filled in) written to the JSON sidecar.
struct ExperimentConfig {
  std::string subcommand;
  domain::DomainSpec domain = domain::DomainSpec::full_line();
  std::optional<domain::PotentialSpec> potential;
  std::optional<noise::CovarianceModel> noise;
  std::vector<double> t_list;
  double q = 2.0;
  bool gamma = false;  // lt-scaling: gamma-seminorm study instead of the L^q one
  std::size_t n_paths = 0;
  std::optional<int> n_steps;
  std::optional<double> bin_width;
  std::size_t n_realizations = 500;
  std::size_t n_grid = 256;
  std::size_t n_eigen = 10;
  std::optional<double> radius;
  double slope_tolerance = 0.1;
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::filesystem::path out = ".";
  Json echo;
};

/// Command-line values that take precedence over the config file.
struct Overrides {
  std::optional<std::vector<double>> t_list;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::optional<std::string> out;
  std::optional<double> q;
};

/// Applies overrides, fills defaults and validates every field; ConfigError on
/// unknown keys, wrong types or out-of-range values.
ExperimentConfig parse_config(const std::string& subcommand, Json raw, const Overrides& overrides = {});

/// Reads a JSON file (ConfigError when missing or malformed).
Json load_json(const std::filesystem::path& path);

struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

struct Artifacts {
  std::vector<Table> tables;
  Json summary;      // results merged into the sidecar
  std::string text;  // human-readable report for stdout
};

Artifacts run(const ExperimentConfig& config);

/// CSV with a header row and %.17g fields.
std::string format_csv(const Table& table);

/// Writes every table as <name>.csv plus <subcommand>.json into config.out,
/// each through a temporary file and a rename. Returns the written paths.
std::vector<std::filesystem::path> write_artifacts(const ExperimentConfig& config, const Artifacts& artifacts);

/// Parses "0.25,0.5,1" into numbers; InputError on junk.
std::vector<double> parse_list(const std::string& text);

/// Single-line machine-readable error record.
std::string error_json(const std::string& kind, const std::string& message);

}  // namespace rsk::cli
