#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

namespace gaugelab::cli {

/// Standalone SVG line/scatter chart of one report series. The config hash is
/// printed in the footer so a figure can be traced back to its run.
std::string render_svg(const nlohmann::json& series, const std::string& config_hash);

/// Write <series name>.svg for every series of a report into `dir`.
/// Returns the file names. Throws Error if the report has no series.
std::vector<std::string> write_plots(const nlohmann::json& report, const std::string& dir);

}  // namespace gaugelab::cli
