#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "stringlab/report.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using stringlab::ConfigError;
using stringlab::RunConfig;

namespace {

// --param values parse as JSON where possible (numbers, arrays, bools),
// otherwise as plain strings
json parse_param_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return json(text);
  }
}

RunConfig build_config(const std::string& experiment, const std::string& config_path,
                       const std::vector<std::string>& params, bool seed_set,
                       std::uint64_t seed, bool out_set, const std::string& out,
                       bool workers_set, int workers) {
  RunConfig cfg;
  cfg.experiment = experiment;

  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw ConfigError("cannot open config file: " + config_path);
    json doc;
    try {
      in >> doc;
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
      if (key == "seed")
        cfg.seed = value.get<std::uint64_t>();
      else if (key == "workers")
        cfg.workers = value.get<int>();
      else if (key == "out")
        cfg.out_dir = value.get<std::string>();
      else
        cfg.params[key] = value;
    }
  }

  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ConfigError("--param expects key=value, got '" + kv + "'");
    cfg.params[kv.substr(0, eq)] = parse_param_value(kv.substr(eq + 1));
  }
  if (seed_set) cfg.seed = seed;
  if (out_set) cfg.out_dir = out;
  if (workers_set) cfg.workers = workers;
  return cfg;
}

int run_command(const RunConfig& raw) {
  RunConfig cfg;
  try {
    cfg = stringlab::resolve_config(raw);  // nothing written before this
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  const auto start = std::chrono::steady_clock::now();
  stringlab::RunReport report;
  try {
    report = stringlab::run_experiment(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  report.wall_clock_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  fs::create_directories(cfg.out_dir);
  for (const auto& table : report.tables) {
    std::ofstream os(fs::path(cfg.out_dir) / (table.name + ".csv"),
                     std::ios::binary);
    stringlab::write_csv(table, os);
  }
  {
    std::ofstream os(fs::path(cfg.out_dir) / "report.json", std::ios::binary);
    os << report.to_json().dump(2) << "\n";
  }

  bool ok = true;
  for (const auto& check : report.checks) {
    std::cout << (check.pass ? "PASS" : "FAIL") << "  " << check.name
              << "  observed=" << check.observed
              << " threshold=" << check.threshold;
    if (!check.detail.empty()) std::cout << "  (" << check.detail << ")";
    std::cout << "\n";
    if (!check.pass) ok = false;
  }
  std::cout << (ok ? "all checks passed" : "CHECK FAILURES") << "; report in "
            << cfg.out_dir << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stationary pinned string simulation and verification lab"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a named experiment");
  std::string experiment, config_path, out_dir;
  std::uint64_t seed = 0;
  int workers = 0;
  std::vector<std::string> params;
  run->add_option("experiment", experiment, "experiment name")->required();
  run->add_option("--config", config_path, "JSON config file");
  auto* seed_opt = run->add_option("--seed", seed, "master seed");
  auto* out_opt = run->add_option("--out", out_dir, "output directory");
  auto* workers_opt =
      run->add_option("--workers", workers, "worker count (0 = auto)");
  run->add_option("--param", params, "key=value override (repeatable)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const RunConfig cfg = build_config(
        experiment, config_path, params, seed_opt->count() > 0, seed,
        out_opt->count() > 0, out_dir, workers_opt->count() > 0, workers);
    return run_command(cfg);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
