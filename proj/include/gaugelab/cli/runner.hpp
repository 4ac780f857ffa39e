#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "gaugelab/cli/config.hpp"

namespace gaugelab::cli {

/// Exit status contract of the command-line tool.
enum ExitCode : int {
  kPass = 0,
  kExpectationFailed = 1,
  kConfigError = 2,
  kRuntimeError = 3,
};

struct RunOptions {
  std::optional<std::string> out_dir;  ///< --out; wins over everything
  std::optional<std::uint64_t> seed;   ///< --seed; replaces the config seed
  int jobs = 1;
  bool write_files = true;
};

struct RunResult {
  nlohmann::json report;  ///< deterministic: no timestamps, no durations
  bool pass = true;
  double seconds = 0.0;
  std::string out_dir;
  std::vector<std::string> files;  ///< written, relative to out_dir
};

/// Output directory: --out, else output.dir, else $GAUGELAB_OUT, else ./gaugelab-out.
std::string resolve_out_dir(const ScenarioConfig& config, const std::optional<std::string>& cli_out);

/// Module-level checks that need the scenario objects (geometry fits the
/// lattice, packets clear the mask, trajectory file readable). Throws ConfigError.
void preflight(const ScenarioConfig& config);

/// Run one scenario, evaluate its expectations and write report.json,
/// timing.json and the declared outputs.
RunResult run(const ScenarioConfig& config, const RunOptions& options = {});

/// Serialised report exactly as written to report.json.
std::string dump_report(const nlohmann::json& report);

}  // namespace gaugelab::cli
