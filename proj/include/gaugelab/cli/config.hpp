#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gaugelab/core/error.hpp"
#include "gaugelab/core/units.hpp"

namespace gaugelab::cli {

/// Malformed config text, unknown key, missing or out-of-range field. The
/// message always names the offending field path.
class ConfigError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::string_view kCodeVersion = "0.1.0";

/// Every scenario kind, in documentation order.
const std::vector<std::string>& scenario_kinds();

using Value = std::variant<bool, long, double, std::string, std::vector<double>>;

/// A declared expectation: observable within tolerance of target.
/// Absolute tolerance `tol` and relative tolerance `rtol` (against |target|)
/// are combined as max(tol, rtol |target|).
struct Expectation {
  std::string observable;
  double target = 0.0;
  std::optional<double> tol;
  std::optional<double> rtol;

  double tolerance() const;
  friend bool operator==(const Expectation&, const Expectation&) = default;
};

/// One validated scenario run: kind, seed, every field of that kind with
/// defaults filled (keyed "section.key"), and the declared expectations.
struct ScenarioConfig {
  std::string kind;
  std::uint64_t seed = 0;
  std::map<std::string, Value> values;
  std::vector<Expectation> expectations;  ///< sorted by observable

  double number(const std::string& path) const;
  long integer(const std::string& path) const;
  bool flag(const std::string& path) const;
  const std::string& text(const std::string& path) const;
  const std::vector<double>& list(const std::string& path) const;
  bool has(const std::string& path) const { return values.count(path) != 0; }

  UnitSystem units() const;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parse INI-style text ("key = value" lines under "[section]" headers,
/// comments with ; or #). Throws ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Canonical text form; parse_config(serialize(c)) == c.
std::string serialize(const ScenarioConfig& config);

/// Range checks, including the lattice time-step guard. parse_config calls it.
void validate(const ScenarioConfig& config);

/// Observables of a kind that may appear in the [expect] section.
const std::vector<std::string>& observables(const std::string& kind);

/// Whether an observable is an angle compared modulo 2 pi.
bool is_phase_observable(const std::string& observable);

/// FNV-1a 64 of the canonical serialisation, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

/// Markdown table of every field: path, type, default, kinds.
std::string schema_reference();

}  // namespace gaugelab::cli
