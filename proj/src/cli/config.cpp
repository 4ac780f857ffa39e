#include "gaugelab/cli/config.hpp"

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "gaugelab/lattice/propagator.hpp"

namespace gaugelab::cli {

namespace {

enum class Type { boolean, integer, number, text, list };

struct Field {
  std::string path;
  Type type;
  std::string fallback;  ///< default in config syntax; empty + required means no default
  std::vector<std::string> kinds;  ///< empty: every kind
  bool required = false;
  std::string doc;
};

const std::string RS = "ring-spectrum";
const std::string FR = "flux-ramp";
const std::string RF = "rotating-frame";
const std::string TB = "two-body-phase";
const std::string AB = "ab-interference";
const std::string SF = "sourceless-field";
const std::string FB = "flyby";
const std::string AS = "annulus-spectrum";
const std::string CS = "charge-scaling";
const std::string CP = "cooper-phase";

const std::vector<Field>& schema() {
  static const std::vector<Field> fields = {
      {"units.hbar", Type::number, "1", {}, false, "reduced Planck constant"},
      {"units.c", Type::number, "1", {}, false, "speed of light"},
      {"units.e", Type::number, "1", {}, false, "elementary charge"},
      {"output.dir", Type::text, "", {}, false, "output directory (overridden by --out)"},
      {"output.plots", Type::boolean, "true", {}, false, "write SVG plots"},
      {"output.timeseries", Type::boolean, "true", {AB, SF, FB, CS}, false, "write timeseries.csv"},
      {"output.snapshots", Type::boolean, "false", {AB, SF, FB, CS}, false, "write final |psi|^2 snapshots"},

      {"particle.mass", Type::number, "1", {RS, FR, RF, AB, SF, FB, AS, CS}, false, "particle mass"},
      {"particle.charge", Type::number, "1", {RS, FR, AB, SF, FB, AS, CS}, false, "charge in units of e"},
      {"particle.charge", Type::number, "2", {CP}, false, "carrier charge in units of e (a pair: 2)"},

      {"flux.quanta", Type::number, "", {RS, CP}, true, "flux in units of hc/e"},
      {"flux.quanta", Type::number, "", {FR}, true, "final flux of the ramp, units of hc/e"},
      {"flux.quanta", Type::number, "0.5", {AB, FB, CS}, false, "flux line, units of hc/e (charge-scaling: base flux)"},
      {"flux.quanta", Type::number, "0", {AS}, false, "flux line, units of hc/e"},
      {"flux.from", Type::number, "0", {FR}, false, "initial flux of the ramp"},

      {"geometry.radius", Type::number, "1", {RS, FR}, false, "ring radius"},
      {"numerics.mode_cutoff", Type::integer, "32", {RS, FR}, false, "angular momentum cutoff N"},
      {"numerics.duration", Type::number, "10", {FR}, false, "ramp duration"},
      {"numerics.resolution", Type::integer, "256", {FR}, false, "schedule sample resolution"},
      {"numerics.initial_mode", Type::integer, "0", {FR}, false, "occupied mode at t = 0"},
      {"ramp.shape", Type::text, "smooth", {FR}, false, "smooth | linear"},

      {"geometry.r_inner", Type::number, "0", {RF}, false, "inner radius (0: regular axis)"},
      {"geometry.r_outer", Type::number, "8", {RF}, false, "outer wall radius"},
      {"potential.omega", Type::number, "1", {RF}, false, "harmonic trap frequency"},
      {"frame.omega", Type::number, "0.3", {RF}, false, "frame angular speed"},
      {"numerics.radial_points", Type::integer, "256", {RF}, false, "radial nodes M_r"},
      {"numerics.angular_points", Type::integer, "32", {RF}, false, "angular nodes M_theta (even, >= 8)"},
      {"numerics.trial_states", Type::integer, "20", {RF}, false, "seeded probe states"},
      {"numerics.levels", Type::integer, "10", {RF}, false, "joint eigenstates checked"},
      {"numerics.route", Type::text, "polar", {RF}, false, "polar | cartesian assembly of the expanded rotating Hamiltonian"},

      {"twobody.m1", Type::number, "1", {TB}, false, "mass of particle 1"},
      {"twobody.m2", Type::number, "1", {TB}, false, "mass of particle 2"},
      {"twobody.alpha", Type::number, "0.5", {TB}, false, "coupling alpha"},
      {"twobody.loops", Type::integer, "1", {TB}, false, "signed CCW loops (0: out and back)"},
      {"twobody.radius", Type::number, "1", {TB}, false, "orbit radius"},
      {"twobody.trajectory", Type::text, "", {TB}, false, "CSV trajectory t,x1,y1,x2,y2 (replaces the orbit)"},
      {"numerics.samples", Type::integer, "256", {TB}, false, "samples per loop"},
      {"numerics.period", Type::number, "1", {TB}, false, "time per loop"},

      {"numerics.nx", Type::integer, "256", {AB, SF, FB, CS}, false, "lattice sites along x"},
      {"numerics.ny", Type::integer, "256", {AB, SF, FB, CS}, false, "lattice sites along y"},
      {"numerics.a", Type::number, "1", {AB, SF, FB, CS}, false, "lattice spacing"},
      {"numerics.nx", Type::integer, "200", {AS}, false, "lattice sites along x"},
      {"numerics.ny", Type::integer, "200", {AS}, false, "lattice sites along y"},
      {"numerics.a", Type::number, "0.5", {AS}, false, "lattice spacing"},
      {"numerics.dt", Type::number, "0.5", {AB, SF, FB, CS}, false, "time step (<= m a^2 / hbar)"},
      {"numerics.duration", Type::number, "800", {AB, SF, CS}, false, "transport time T"},
      {"numerics.duration", Type::number, "168", {FB}, false, "flight time"},
      {"numerics.sample_every", Type::integer, "20", {AB, SF, FB, CS}, false, "time-series cadence in steps"},
      {"numerics.random_gauge", Type::boolean, "false", {AB, SF, FB, AS}, false, "apply a seeded random gauge"},
      {"numerics.levels", Type::integer, "5", {AS}, false, "eigenvalues computed"},
      {"numerics.tolerance", Type::number, "1e-10", {AS}, false, "eigen residual tolerance"},

      {"geometry.path_radius", Type::number, "60", {AB, SF, CS}, false, "radius of the arm paths"},
      {"geometry.mask_radius", Type::number, "12", {AB, CS}, false, "hard-wall disc around the flux"},
      {"geometry.mask_radius", Type::number, "0", {SF}, false, "hard-wall disc at the centre"},
      {"geometry.mask_radius", Type::number, "8", {FB}, false, "hard-wall disc around the flux"},
      {"trap.omega", Type::number, "0.0625", {AB, SF, CS}, false, "transport trap frequency"},
      {"contact.strength", Type::number, "0", {AB}, false, "wall repulsion g (scaled by (q/e)^2)"},
      {"contact.strength", Type::number, "0.1", {CS}, false, "wall repulsion g (scaled by (q/e)^2)"},
      {"contact.length", Type::number, "12", {AB, CS}, false, "wall repulsion range"},

      {"patch.x", Type::number, "0", {SF}, false, "patch centre x"},
      {"patch.y", Type::number, "0", {SF}, false, "patch centre y"},
      {"patch.size", Type::integer, "9", {SF}, false, "plaquettes per side"},
      {"patch.flux_quanta", Type::number, "0.5", {SF}, false, "B times patch area, units of hc/e"},
      {"patch.t_on", Type::number, "-1", {SF}, false, "switch-on time (negative: T/4)"},
      {"patch.t_off", Type::number, "-1", {SF}, false, "switch-off time (negative: 3T/4)"},

      {"packet.sigma", Type::number, "10", {FB}, false, "packet width"},
      {"packet.k0", Type::number, "1", {FB}, false, "packet wavevector along +y"},
      {"geometry.offset", Type::number, "56", {FB}, false, "lateral distance of the course from the flux"},
      {"geometry.start_y", Type::number, "-70", {FB}, false, "initial packet y"},

      {"geometry.radius", Type::number, "40", {AS}, false, "annulus mean radius"},
      {"geometry.half_width", Type::number, "8", {AS}, false, "walls beyond |r - R| > half_width"},
      {"confinement.omega", Type::number, "0.25", {AS}, false, "radial confinement frequency"},

      {"sweep.flux_quanta", Type::list, "", {RS, AB, FB, AS}, false, "flux sweep, units of hc/e"},
      {"sweep.lambda", Type::list, "1, 0.5, 0.25", {CS}, false, "charge scale factors"},
  };
  return fields;
}

struct ObservableInfo {
  std::string name;
  std::vector<std::string> kinds;
  double default_tol;
  double default_rtol;
};

const std::vector<ObservableInfo>& observable_table() {
  static const std::vector<ObservableInfo> table = {
      {"ground_mode", {RS}, 0.5, 0.0},
      {"ground_energy", {RS, AS}, 1e-9, 0.0},
      {"degeneracy_splitting", {RS, AS}, 1e-9, 0.0},
      {"periodicity_error", {RS, AS}, 1e-9, 0.0},
      {"persistent_current", {RS}, 1e-9, 0.0},
      {"angular_velocity", {RS}, 1e-9, 0.0},
      {"final_angular_velocity", {FR}, 1e-9, 0.0},
      {"occupation_change", {FR}, 1e-12, 0.0},
      {"norm_error", {FR}, 1e-12, 0.0},
      {"excitation_energy", {FR}, 1e-9, 0.0},
      {"commutator_residual", {RF}, 1e-8, 0.0},
      {"expanded_residual", {RF}, 1e-8, 0.0},
      {"shift_error", {RF}, 1e-8, 0.0},
      {"hermiticity_defect", {RF}, 1e-10, 0.0},
      {"oscillator_error", {RF}, 0.01, 0.0},
      {"phase", {TB, CP}, 1e-9, 0.0},
      {"winding", {TB}, 0.5, 0.0},
      {"reduced_phase", {CP}, 1e-12, 0.0},
      {"pair_residual", {CP}, 1e-15, 0.0},
      {"electron_residual", {CP}, 1e-15, 0.0},
      {"shift", {AB, SF}, 0.01, 0.02},
      {"fringe_shift", {AB, SF}, 0.01, 0.02},
      {"overlap", {AB, SF}, 0.0, 0.1},
      {"norm_drift", {AB, SF, FB}, 1e-10, 0.0},
      {"slope", {AB}, 0.0, 0.02},
      {"fit_residual", {AB}, 0.05, 0.0},
      {"phase_difference", {FB}, 0.01, 0.02},
      {"velocity_deviation", {FB}, 1e-3, 0.0},
      {"mirror_asymmetry", {FB}, 1e-10, 0.0},
      {"ring_deviation", {AS}, 0.02, 0.0},
      {"phase_spread", {CS}, 0.02, 0.0},
      {"ratio_error", {CS}, 0.1, 0.0},
      {"scaling_series_error", {CS}, 1e-12, 0.0},
  };
  return table;
}

bool applies(const std::vector<std::string>& kinds, const std::string& kind) {
  return kinds.empty() || std::find(kinds.begin(), kinds.end(), kind) != kinds.end();
}

const Field* find_field(const std::string& path, const std::string& kind) {
  for (const auto& f : schema()) {
    if (f.path == path && applies(f.kinds, kind)) return &f;
  }
  return nullptr;
}

bool known_anywhere(const std::string& path) {
  return std::any_of(schema().begin(), schema().end(), [&](const Field& f) { return f.path == path; });
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& path, const std::string& raw) {
  const std::string s = trim(raw);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(path + ": expected a finite number, got '" + raw + "'");
  }
  return v;
}

long to_integer(const std::string& path, const std::string& raw) {
  const std::string s = trim(raw);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(path + ": expected an integer, got '" + raw + "'");
  }
  return v;
}

bool to_bool(const std::string& path, const std::string& raw) {
  std::string s = trim(raw);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  throw ConfigError(path + ": expected true or false, got '" + raw + "'");
}

std::vector<double> to_list(const std::string& path, const std::string& raw) {
  std::vector<double> out;
  const std::string s = trim(raw);
  if (s.empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_number(path, item));
  return out;
}

Value convert(const Field& f, const std::string& raw) {
  switch (f.type) {
    case Type::boolean: return to_bool(f.path, raw);
    case Type::integer: return to_integer(f.path, raw);
    case Type::number: return to_number(f.path, raw);
    case Type::list: return to_list(f.path, raw);
    case Type::text: return trim(raw);
  }
  return {};
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::string format_value(const Value& v) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(long l) const { return std::to_string(l); }
    std::string operator()(double d) const { return format_number(d); }
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(const std::vector<double>& l) const {
      std::string out;
      for (std::size_t k = 0; k < l.size(); ++k) out += (k ? ", " : "") + format_number(l[k]);
      return out;
    }
  };
  return std::visit(Visitor{}, v);
}

const ObservableInfo* find_observable(const std::string& kind, const std::string& name) {
  for (const auto& o : observable_table()) {
    if (o.name == name && applies(o.kinds, kind)) return &o;
  }
  return nullptr;
}

void parse_expectations(const boost::property_tree::ptree& section, ScenarioConfig& cfg) {
  std::map<std::string, Expectation> found;
  std::map<std::string, std::pair<std::optional<double>, std::optional<double>>> tols;
  for (const auto& [key, node] : section) {
    const std::string path = "expect." + key;
    std::string base = key;
    int which = 0;  // 0 target, 1 tol, 2 rtol
    if (key.size() > 5 && key.ends_with("_rtol")) {
      base = key.substr(0, key.size() - 5);
      which = 2;
    } else if (key.size() > 4 && key.ends_with("_tol")) {
      base = key.substr(0, key.size() - 4);
      which = 1;
    }
    if (!find_observable(cfg.kind, base)) {
      throw ConfigError("unknown key '" + path + "': '" + base + "' is not an observable of kind '" + cfg.kind + "'");
    }
    const double v = to_number(path, node.data());
    if (which == 0) {
      found[base] = Expectation{base, v, std::nullopt, std::nullopt};
    } else {
      if (!(v > 0.0)) throw ConfigError(path + ": tolerances must be > 0");
      (which == 1 ? tols[base].first : tols[base].second) = v;
    }
  }
  for (const auto& [name, t] : tols) {
    if (!found.count(name)) throw ConfigError("expect." + name + ": tolerance given without a target");
  }
  for (auto& [name, e] : found) {
    const auto it = tols.find(name);
    if (it != tols.end()) {
      e.tol = it->second.first;
      e.rtol = it->second.second;
    }
    if (!e.tol && !e.rtol) {
      const ObservableInfo* info = find_observable(cfg.kind, name);
      if (info->default_tol > 0.0) e.tol = info->default_tol;
      if (info->default_rtol > 0.0) e.rtol = info->default_rtol;
    }
    cfg.expectations.push_back(e);
  }
}

void require_positive(const ScenarioConfig& c, const std::string& path) {
  if (c.has(path) && !(c.number(path) > 0.0)) throw ConfigError(path + ": must be > 0");
}

void require_at_least(const ScenarioConfig& c, const std::string& path, long lo) {
  if (c.has(path) && c.integer(path) < lo) throw ConfigError(path + ": must be >= " + std::to_string(lo));
}

}  // namespace

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds = {RS, FR, RF, TB, AB, SF, FB, AS, CS, CP};
  return kinds;
}

double Expectation::tolerance() const {
  return std::max(tol.value_or(0.0), rtol.value_or(0.0) * std::abs(target));
}

double ScenarioConfig::number(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ConfigError(path + ": not defined for kind '" + kind + "'");
  if (const auto* l = std::get_if<long>(&it->second)) return static_cast<double>(*l);
  return std::get<double>(it->second);
}

long ScenarioConfig::integer(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ConfigError(path + ": not defined for kind '" + kind + "'");
  return std::get<long>(it->second);
}

bool ScenarioConfig::flag(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ConfigError(path + ": not defined for kind '" + kind + "'");
  return std::get<bool>(it->second);
}

const std::string& ScenarioConfig::text(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ConfigError(path + ": not defined for kind '" + kind + "'");
  return std::get<std::string>(it->second);
}

const std::vector<double>& ScenarioConfig::list(const std::string& path) const {
  const auto it = values.find(path);
  if (it == values.end()) throw ConfigError(path + ": not defined for kind '" + kind + "'");
  return std::get<std::vector<double>>(it->second);
}

UnitSystem ScenarioConfig::units() const {
  return UnitSystem(number("units.hbar"), number("units.c"), number("units.e"));
}

ScenarioConfig parse_config(std::string_view text) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    std::istringstream is{std::string(text)};
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  ScenarioConfig cfg;
  const auto kind = tree.get_optional<std::string>("kind");
  if (!kind || trim(*kind).empty()) throw ConfigError("kind: required field missing");
  cfg.kind = trim(*kind);
  const auto& kinds = scenario_kinds();
  if (std::find(kinds.begin(), kinds.end(), cfg.kind) == kinds.end()) {
    std::string all;
    for (const auto& k : kinds) all += (all.empty() ? "" : ", ") + k;
    throw ConfigError("kind: unknown scenario kind '" + cfg.kind + "'; expected one of " + all);
  }

  std::set<std::string> sections;
  for (const auto& f : schema()) sections.insert(f.path.substr(0, f.path.find('.')));
  sections.insert("expect");

  std::map<std::string, std::string> raw;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      if (key == "kind") continue;
      if (key == "seed") {
        const std::string raw = trim(node.data());
        std::uint64_t s = 0;
        const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), s);
        if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
          throw ConfigError("seed: expected an integer in [0, 2^64), got '" + node.data() + "'");
        }
        cfg.seed = s;
        continue;
      }
      if (sections.count(key) && trim(node.data()).empty()) continue;  // empty section
      throw ConfigError("unknown key '" + key + "'");
    }
    if (key == "expect") {
      parse_expectations(node, cfg);
      continue;
    }
    for (const auto& [sub, leaf] : node) {
      const std::string path = key + "." + sub;
      if (!leaf.empty()) throw ConfigError(path + ": nested sections are not supported");
      if (!find_field(path, cfg.kind)) {
        if (known_anywhere(path)) throw ConfigError("key '" + path + "' does not apply to kind '" + cfg.kind + "'");
        throw ConfigError("unknown key '" + path + "'");
      }
      raw[path] = leaf.data();
    }
  }

  for (const auto& f : schema()) {
    if (!applies(f.kinds, cfg.kind) || cfg.values.count(f.path)) continue;
    const auto it = raw.find(f.path);
    if (it != raw.end()) {
      cfg.values[f.path] = convert(f, it->second);
    } else if (f.required) {
      throw ConfigError(f.path + ": required for kind '" + cfg.kind + "'");
    } else {
      cfg.values[f.path] = convert(f, f.fallback);
    }
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize(const ScenarioConfig& config) {
  std::ostringstream os;
  os << "kind = " << config.kind << "\n";
  os << "seed = " << config.seed << "\n";
  std::string section;
  for (const auto& [path, value] : config.values) {
    const auto dot = path.find('.');
    const std::string sec = path.substr(0, dot);
    if (sec != section) {
      os << "\n[" << sec << "]\n";
      section = sec;
    }
    os << path.substr(dot + 1) << " = " << format_value(value) << "\n";
  }
  if (!config.expectations.empty()) {
    os << "\n[expect]\n";
    for (const auto& e : config.expectations) {
      os << e.observable << " = " << format_number(e.target) << "\n";
      if (e.tol) os << e.observable << "_tol = " << format_number(*e.tol) << "\n";
      if (e.rtol) os << e.observable << "_rtol = " << format_number(*e.rtol) << "\n";
    }
  }
  return os.str();
}

void validate(const ScenarioConfig& c) {
  for (const char* p : {"units.hbar", "units.c", "units.e", "particle.mass", "geometry.radius", "numerics.duration",
                        "numerics.period", "twobody.m1", "twobody.m2", "numerics.a", "trap.omega", "contact.length",
                        "packet.sigma", "confinement.omega", "geometry.half_width", "geometry.path_radius",
                        "geometry.r_outer", "numerics.tolerance", "potential.omega"}) {
    require_positive(c, p);
  }
  for (const char* p : {"geometry.mask_radius", "geometry.r_inner", "contact.strength"}) {
    if (c.has(p) && !(c.number(p) >= 0.0)) throw ConfigError(std::string(p) + ": must be >= 0");
  }
  require_at_least(c, "numerics.mode_cutoff", 2);
  require_at_least(c, "numerics.resolution", 8);
  require_at_least(c, "numerics.radial_points", 8);
  require_at_least(c, "numerics.angular_points", 8);
  require_at_least(c, "numerics.trial_states", 1);
  require_at_least(c, "numerics.levels", 1);
  require_at_least(c, "numerics.samples", 5);
  require_at_least(c, "numerics.nx", 16);
  require_at_least(c, "numerics.ny", 16);
  require_at_least(c, "numerics.sample_every", 0);
  require_at_least(c, "patch.size", 1);
  if (c.has("numerics.angular_points") && c.integer("numerics.angular_points") % 2 != 0) {
    throw ConfigError("numerics.angular_points: must be even");
  }
  if (c.has("numerics.initial_mode") && std::abs(c.integer("numerics.initial_mode")) > c.integer("numerics.mode_cutoff")) {
    throw ConfigError("numerics.initial_mode: must lie in [-mode_cutoff, mode_cutoff]");
  }
  if (c.has("ramp.shape") && c.text("ramp.shape") != "smooth" && c.text("ramp.shape") != "linear") {
    throw ConfigError("ramp.shape: expected 'smooth' or 'linear', got '" + c.text("ramp.shape") + "'");
  }
  if (c.has("numerics.route") && c.text("numerics.route") != "polar" && c.text("numerics.route") != "cartesian") {
    throw ConfigError("numerics.route: expected 'polar' or 'cartesian', got '" + c.text("numerics.route") + "'");
  }
  if (c.has("geometry.r_inner") && !(c.number("geometry.r_outer") > c.number("geometry.r_inner"))) {
    throw ConfigError("geometry.r_outer: must exceed geometry.r_inner");
  }
  if (c.has("sweep.lambda")) {
    if (c.list("sweep.lambda").empty()) throw ConfigError("sweep.lambda: needs at least one value");
    for (double l : c.list("sweep.lambda")) {
      if (!(l > 0.0)) throw ConfigError("sweep.lambda: every lambda must be > 0");
    }
  }
  if (c.has("sweep.flux_quanta") && c.list("sweep.flux_quanta").size() == 1) {
    throw ConfigError("sweep.flux_quanta: a sweep needs at least two values");
  }
  if (c.has("numerics.dt")) {
    const double dt = c.number("numerics.dt");
    const double bound = lattice::max_time_step(c.number("particle.mass"), c.number("numerics.a"), c.units());
    if (!(dt > 0.0) || dt > bound) {
      std::ostringstream msg;
      msg << "numerics.dt: " << format_number(dt) << " violates the time-step guard 0 < dt <= m a^2 / hbar = "
          << format_number(bound);
      throw ConfigError(msg.str());
    }
  }
}

const std::vector<std::string>& observables(const std::string& kind) {
  static std::map<std::string, std::vector<std::string>> cache = [] {
    std::map<std::string, std::vector<std::string>> m;
    for (const auto& k : scenario_kinds()) {
      for (const auto& o : observable_table()) {
        if (applies(o.kinds, k)) m[k].push_back(o.name);
      }
    }
    return m;
  }();
  return cache.at(kind);
}

bool is_phase_observable(const std::string& observable) {
  return observable == "shift" || observable == "fringe_shift" || observable == "phase_difference" ||
         observable == "reduced_phase";
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string schema_reference() {
  auto cell = [](const std::string& text) {
    std::string out;
    for (char ch : text) out += ch == '|' ? std::string("\\|") : std::string(1, ch);
    return out;
  };
  std::ostringstream os;
  os << "| key | type | default | kinds | meaning |\n|---|---|---|---|---|\n";
  os << "| kind | text | (required) | all | scenario kind |\n";
  os << "| seed | integer | 0 | all | random seed |\n";
  const char* names[] = {"bool", "integer", "number", "text", "list"};
  for (const auto& f : schema()) {
    std::string kinds;
    for (const auto& k : f.kinds) kinds += (kinds.empty() ? "" : ", ") + k;
    os << "| " << f.path << " | " << names[static_cast<int>(f.type)] << " | "
       << (f.required ? "(required)" : (f.fallback.empty() ? "(empty)" : f.fallback)) << " | "
       << (kinds.empty() ? "all" : kinds) << " | " << cell(f.doc) << " |\n";
  }
  return os.str();
}

}  // namespace gaugelab::cli
