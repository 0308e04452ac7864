#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace stringlab {

inline constexpr const char* kToolVersion = "0.1.0";
// fixed so the default invocation is reproducible
inline constexpr std::uint64_t kDefaultSeed = 1729;

struct RunConfig {
  std::string experiment;
  nlohmann::ordered_json params = nlohmann::ordered_json::object();
  std::uint64_t seed = kDefaultSeed;
  std::string out_dir = "out";
  int workers = 0;  // 0 = hardware concurrency
};

struct Check {
  std::string name;
  bool pass = false;
  double observed = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

struct RunReport {
  RunConfig config;
  std::vector<Check> checks;
  std::vector<Table> tables;
  double wall_clock_sec = 0.0;

  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
};

// thrown for invalid experiment names or parameter values (CLI exit code 2)
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> experiment_names();

// Validates config.params against the experiment's schema (unknown keys or
// out-of-range values throw ConfigError) and returns the resolved config.
RunConfig resolve_config(const RunConfig& config);

// Runs the experiment; config must already be resolved.
RunReport run_experiment(const RunConfig& config);

// RFC 4180: comma separated, header row, '.' decimal separator
void write_csv(const Table& table, std::ostream& os);

}  // namespace stringlab
