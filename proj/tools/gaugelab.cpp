// gaugelab command-line driver: run, validate and plot scenario configs.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>

#include "gaugelab/cli/config.hpp"
#include "gaugelab/cli/plots.hpp"
#include "gaugelab/cli/runner.hpp"

namespace fs = std::filesystem;
using namespace gaugelab;
using namespace gaugelab::cli;

namespace {

/// A relative trajectory path is taken relative to the config file.
ScenarioConfig load(const std::string& path) {
  ScenarioConfig cfg = load_config(path);
  auto it = cfg.values.find("twobody.trajectory");
  if (it != cfg.values.end()) {
    const std::string& file = std::get<std::string>(it->second);
    if (!file.empty() && fs::path(file).is_relative()) {
      it->second = (fs::path(path).parent_path() / file).lexically_normal().string();
    }
  }
  return cfg;
}

int cmd_run(const std::string& path, const RunOptions& options) {
  const ScenarioConfig cfg = load(path);
  const RunResult result = run(cfg, options);
  const auto& report = result.report;
  std::printf("%s  seed %llu  config %s  (%.2f s)\n", cfg.kind.c_str(),
              static_cast<unsigned long long>(report.at("seed").get<std::uint64_t>()),
              report.at("config_hash").get<std::string>().c_str(), result.seconds);
  for (const auto& [name, value] : report.at("observables").items()) {
    std::printf("  %-24s %.12g\n", name.c_str(), value.is_number() ? value.get<double>() : std::nan(""));
  }
  for (const auto& e : report.at("expectations")) {
    std::printf("  [%s] %s = %.12g, target %.12g +- %.3g%s\n", e.at("pass").get<bool>() ? "PASS" : "FAIL",
                e.at("observable").get<std::string>().c_str(), e.at("observed").get<double>(),
                e.at("target").get<double>(), e.at("tolerance").get<double>(),
                e.at("circular").get<bool>() ? " (mod 2 pi)" : "");
  }
  std::printf("output: %s\n", result.out_dir.c_str());
  return result.pass ? kPass : kExpectationFailed;
}

int cmd_validate(const std::string& path) {
  const ScenarioConfig cfg = load(path);
  preflight(cfg);
  std::cout << serialize(cfg);
  std::cout << "# config " << config_hash(cfg) << ": ok\n";
  return kPass;
}

int cmd_plot(const std::string& path, const std::string& out) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open report '" + path + "'");
  nlohmann::json report;
  try {
    report = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("report '" + path + "' is not valid JSON: " + e.what());
  }
  if (report.value("format", "") != "gaugelab-report") throw ConfigError("'" + path + "' is not a gaugelab report");
  const std::string dir = out.empty() ? (fs::path(path).parent_path() / "plots").string() : out;
  for (const auto& name : write_plots(report, dir)) std::cout << (fs::path(dir) / name).string() << "\n";
  return kPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaugelab: gauge-potential phase experiments"};
  app.set_version_flag("--version", std::string(kCodeVersion));
  app.require_subcommand(1);

  std::string config_path;
  RunOptions options;
  std::string out;
  std::uint64_t seed = 0;

  auto* run_cmd = app.add_subcommand("run", "run a scenario and write its report");
  run_cmd->add_option("config", config_path, "scenario config file")->required();
  run_cmd->add_option("--out", out, "output directory (default: output.dir, $GAUGELAB_OUT, ./gaugelab-out)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "override the config seed");
  run_cmd->add_option("--jobs,-j", options.jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);

  auto* validate_cmd = app.add_subcommand("validate", "parse and check a config without running it");
  validate_cmd->add_option("config", config_path, "scenario config file")->required();

  std::string report_path;
  auto* plot_cmd = app.add_subcommand("plot", "render the series of a report as SVG");
  plot_cmd->add_option("report", report_path, "report.json")->required();
  plot_cmd->add_option("--out", out, "directory for the SVG files (default: plots/ next to the report)");

  auto* schema_cmd = app.add_subcommand("schema", "print every config key as a markdown table");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      if (!out.empty()) options.out_dir = out;
      if (*seed_opt) options.seed = seed;
      return cmd_run(config_path, options);
    }
    if (validate_cmd->parsed()) return cmd_validate(config_path);
    if (plot_cmd->parsed()) return cmd_plot(report_path, out);
    if (schema_cmd->parsed()) {
      std::cout << schema_reference();
      return kPass;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kPass;
}
