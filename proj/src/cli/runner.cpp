#include "gaugelab/cli/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "gaugelab/cli/plots.hpp"
#include "gaugelab/core/parallel.hpp"
#include "gaugelab/core/phase.hpp"
#include "gaugelab/lattice/scenarios.hpp"
#include "gaugelab/ring/ring_model.hpp"
#include "gaugelab/rotating/rotating_frame.hpp"
#include "gaugelab/twobody/two_body.hpp"

namespace gaugelab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// --- report building blocks -------------------------------------------------

struct Curve {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string style = "line";  // line | points
};

struct Series {
  std::string name;
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::string annotation;
  std::vector<Curve> curves;
};

json to_json(const Series& s) {
  json curves = json::array();
  for (const auto& c : s.curves) {
    curves.push_back({{"label", c.label}, {"style", c.style}, {"x", c.x}, {"y", c.y}});
  }
  return {{"name", s.name},
          {"title", s.title},
          {"xlabel", s.xlabel},
          {"ylabel", s.ylabel},
          {"annotation", s.annotation},
          {"curves", curves}};
}

/// A file produced by a scenario, written only after the run succeeds.
struct Artifact {
  std::string name;
  std::string content;
};

struct Outcome {
  std::map<std::string, double> observables;
  std::vector<Series> series;
  std::vector<Artifact> artifacts;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Charge charge_of(const ScenarioConfig& c) { return Charge::elementary(c.number("particle.charge"), c.units()); }

Flux flux_of(const ScenarioConfig& c, double quanta) { return Flux::quanta(quanta, c.units()); }

/// Index of the sweep member closest to `target`.
std::size_t nearest(const std::vector<double>& values, double target) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (std::abs(values[k] - target) < std::abs(values[best] - target)) best = k;
  }
  return best;
}

std::vector<double> sweep_of(const ScenarioConfig& c) {
  return c.has("sweep.flux_quanta") ? c.list("sweep.flux_quanta") : std::vector<double>{};
}

// --- ring kinds ---------------------------------------------------------------

ring::RingConfig ring_config(const ScenarioConfig& c) {
  ring::RingConfig r;
  r.mass = c.number("particle.mass");
  r.radius = c.number("geometry.radius");
  r.charge = charge_of(c);
  r.flux = flux_of(c, c.number("flux.quanta"));
  r.mode_cutoff = static_cast<int>(c.integer("numerics.mode_cutoff"));
  r.units = c.units();
  return r;
}

/// Flux period h c / q of a ring with this charge.
Flux flux_period(const ring::RingConfig& r) { return Flux(r.units.flux_quantum() * r.units.e() / r.charge.value()); }

std::vector<double> sorted_energies(const std::vector<ring::Level>& levels) {
  std::vector<double> e;
  for (const auto& l : levels) e.push_back(l.energy);
  std::sort(e.begin(), e.end());
  return e;
}

Outcome run_ring_spectrum(const ScenarioConfig& c) {
  const ring::RingConfig cfg = ring_config(c);
  const auto levels = ring::spectrum(cfg);
  const auto energies = sorted_energies(levels);
  const int g = ring::ground_mode(cfg);

  // E_{n+1}(Phi + period) = E_n(Phi) for every n whose partner is inside the cutoff.
  const auto shifted = ring::spectrum(cfg.with_flux(Flux(cfg.flux.value() + flux_period(cfg).value())));
  double periodicity = 0.0;
  for (std::size_t k = 0; k + 1 < levels.size(); ++k) {
    periodicity = std::max(periodicity, std::abs(shifted[k + 1].energy - levels[k].energy));
  }

  Outcome out;
  out.observables = {
      {"ground_mode", g},
      {"ground_energy", energies[0]},
      {"degeneracy_splitting", energies[1] - energies[0]},
      {"periodicity_error", periodicity},
      {"persistent_current", ring::persistent_current(cfg, g)},
      {"angular_velocity", ring::angular_velocity(cfg, ring::ground_state(cfg))},
      {"reduced_flux", cfg.reduced_flux()},
  };

  std::ostringstream csv;
  ring::write_spectrum_csv(csv, cfg);
  out.artifacts.push_back({"spectrum.csv", csv.str()});

  Series levels_plot{"spectrum", "Ring levels", "n", "E_n", "Phi/Phi0 = " + fmt(c.number("flux.quanta")), {}};
  Curve pts{"E_n", {}, {}, "points"};
  for (const auto& l : levels) {
    if (std::abs(l.n) > 6) continue;
    pts.x.push_back(l.n);
    pts.y.push_back(l.energy);
  }
  levels_plot.curves.push_back(pts);
  out.series.push_back(levels_plot);

  auto sweep = sweep_of(c);
  if (sweep.empty()) {
    for (int k = 0; k <= 80; ++k) sweep.push_back(-1.0 + k / 40.0);
  }
  Series bands{"bands", "Ring levels against flux", "Phi / Phi0", "E", "lowest 4 levels", {}};
  for (int band = 0; band < 4; ++band) bands.curves.push_back({"level " + std::to_string(band), {}, {}, "line"});
  for (double q : sweep) {
    const auto e = sorted_energies(ring::spectrum(cfg.with_flux(flux_of(c, q))));
    for (int band = 0; band < 4; ++band) {
      bands.curves[band].x.push_back(q);
      bands.curves[band].y.push_back(e[band]);
    }
  }
  out.series.push_back(bands);
  return out;
}

Outcome run_flux_ramp(const ScenarioConfig& c) {
  ring::RingConfig cfg = ring_config(c);
  const Flux from = flux_of(c, c.number("flux.from"));
  const Flux to = cfg.flux;
  const auto shape = c.text("ramp.shape") == "linear" ? ring::FluxSchedule::Shape::linear
                                                      : ring::FluxSchedule::Shape::smooth;
  const double duration = c.number("numerics.duration");
  const auto schedule =
      ring::FluxSchedule::ramp(from, to, duration, shape, static_cast<int>(c.integer("numerics.resolution")));
  const int n0 = static_cast<int>(c.integer("numerics.initial_mode"));
  const ring::RingState initial = ring::RingState::pure(cfg.mode_cutoff, n0);
  const ring::RingState ramped = ring::evolve_ramp(cfg, initial, schedule);

  const ring::RingConfig finish = cfg.with_flux(to);
  const auto levels = ring::spectrum(finish);
  double occupation_change = 0.0;
  double energy = 0.0;
  for (int n = -cfg.mode_cutoff; n <= cfg.mode_cutoff; ++n) {
    occupation_change = std::max(occupation_change, std::abs(ramped.occupation(n) - initial.occupation(n)));
    energy += ramped.occupation(n) * levels[static_cast<std::size_t>(n + cfg.mode_cutoff)].energy;
  }
  const int g = ring::ground_mode(finish);
  const double e_ground = levels[static_cast<std::size_t>(g + cfg.mode_cutoff)].energy;

  Outcome out;
  out.observables = {
      {"final_angular_velocity", ring::angular_velocity(finish, ramped)},
      {"occupation_change", occupation_change},
      {"norm_error", std::abs(ramped.norm_squared() - 1.0)},
      {"excitation_energy", energy - e_ground},
      {"final_ground_mode", g},
      {"final_ground_velocity", ring::angular_velocity(finish, ring::ground_state(finish))},
  };

  // Populations are conserved, so <theta-dot>(t) follows from Phi(t) alone.
  Series vel{"velocity", "Angular velocity during the ramp", "t", "<theta-dot>", "initial mode n = " + std::to_string(n0), {}};
  Curve v{"<theta-dot>", {}, {}, "line"};
  Curve phi{"Phi / Phi0", {}, {}, "line"};
  for (int k = 0; k <= 200; ++k) {
    const double t = duration * k / 200.0;
    const Flux f = schedule.at(t);
    v.x.push_back(t);
    v.y.push_back(ring::angular_velocity(cfg.with_flux(f), initial));
    phi.x.push_back(t);
    phi.y.push_back(f.in_quanta(cfg.units));
  }
  vel.curves = {v, phi};
  out.series.push_back(vel);
  return out;
}

// --- rotating frame -------------------------------------------------------------

Outcome run_rotating_frame(const ScenarioConfig& c) {
  const rotating::PolarGrid grid(c.number("geometry.r_inner"), c.number("geometry.r_outer"),
                                 static_cast<int>(c.integer("numerics.radial_points")),
                                 static_cast<int>(c.integer("numerics.angular_points")));
  const rotating::Particle particle{c.number("particle.mass"), c.units()};
  const double trap = c.number("potential.omega");
  const double omega = c.number("frame.omega");
  const double hbar = particle.units.hbar();
  const rotating::RadialPotential potential = [m = particle.mass, trap](double r) {
    return 0.5 * m * trap * trap * r * r;
  };
  const auto route = c.text("numerics.route") == "cartesian" ? rotating::ExpansionRoute::cartesian
                                                             : rotating::ExpansionRoute::polar;

  const auto h = rotating::build_hamiltonian(grid, particle, potential);
  const auto lz = rotating::build_angular_momentum(grid, particle.units);
  const auto frame = rotating::transform_hamiltonian(h, lz, omega, c.seed);
  const auto trials = rotating::trial_states(grid, static_cast<int>(c.integer("numerics.trial_states")), c.seed);
  const double expanded = rotating::expanded_form_residual(h, lz, omega, particle, potential, trials, route);

  const int count = static_cast<int>(c.integer("numerics.levels"));
  const auto joint = rotating::joint_eigenstates(grid, particle, potential, count);
  double shift_error = 0.0;
  double oscillator_error = 0.0;
  for (const auto& s : joint) {
    const rotating::StateVector expected = (s.energy - s.n * hbar * omega) * s.state;
    shift_error = std::max(shift_error, (frame.hamiltonian.apply(s.state) - expected).norm());
    // 2D oscillator: E = hbar w (2k + |n| + 1).
    const double quanta = s.energy / (hbar * trap);
    const double k = std::max(0.0, std::round((quanta - 1.0 - std::abs(s.n)) / 2.0));
    const double exact = hbar * trap * (2.0 * k + std::abs(s.n) + 1.0);
    oscillator_error = std::max(oscillator_error, std::abs(s.energy - exact) / exact);
  }

  Outcome out;
  out.observables = {
      {"commutator_residual", frame.commutator_residual},
      {"expanded_residual", expanded},
      {"shift_error", shift_error},
      {"hermiticity_defect", std::max(h.hermiticity_defect(), frame.hamiltonian.hermiticity_defect())},
      {"oscillator_error", oscillator_error},
  };

  Series spec{"levels", "Lab and rotating-frame levels", "L_z / hbar", "E", "omega = " + fmt(omega), {}};
  Curve lab{"H", {}, {}, "points"};
  Curve rot{"H - omega L_z", {}, {}, "points"};
  for (const auto& s : joint) {
    lab.x.push_back(s.n);
    lab.y.push_back(s.energy);
  }
  for (const auto& l : rotating::rotating_spectrum(grid, particle, potential, omega, count)) {
    rot.x.push_back(l.n);
    rot.y.push_back(l.energy);
  }
  spec.curves = {lab, rot};
  out.series.push_back(spec);
  return out;
}

// --- two body -------------------------------------------------------------------

twobody::TwoBodyTrajectory two_body_trajectory(const ScenarioConfig& c) {
  const std::string& file = c.text("twobody.trajectory");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ConfigError("twobody.trajectory: cannot open '" + file + "'");
    return twobody::read_trajectory_csv(in);
  }
  return twobody::orbit_trajectory({0.0, 0.0}, c.number("twobody.radius"), static_cast<int>(c.integer("twobody.loops")),
                                   static_cast<int>(c.integer("numerics.samples")), c.number("numerics.period"));
}

Outcome run_two_body(const ScenarioConfig& c) {
  const twobody::TwoBodyConfig cfg{c.number("twobody.m1"), c.number("twobody.m2"), c.number("twobody.alpha")};
  const auto traj = two_body_trajectory(c);
  const double phase = twobody::encircling_phase(cfg, traj);

  std::vector<Vec2> rel;
  for (std::size_t k = 0; k < traj.size(); ++k) rel.push_back(traj.r2()[k] - traj.r1()[k]);
  const auto field = twobody::field_vanishing_check(cfg, rel);

  Outcome out;
  out.observables = {
      {"phase", phase},
      {"winding", cfg.alpha != 0.0 ? phase / (kTwoPi * cfg.alpha) : 0.0},
      {"max_field", field.max_field_resolved},
  };

  std::ostringstream csv;
  twobody::write_trajectory_csv(csv, traj);
  out.artifacts.push_back({"trajectory.csv", csv.str()});

  Series path{"relative_path", "Relative coordinate r2 - r1", "x", "y", "", {}};
  Curve p{"r2 - r1", {}, {}, "line"};
  for (const auto& d : rel) {
    p.x.push_back(d.x);
    p.y.push_back(d.y);
  }
  path.curves.push_back(p);
  out.series.push_back(path);

  Series acc{"phase", "Accumulated interaction phase", "t", "phase", "alpha = " + fmt(cfg.alpha), {}};
  Curve a{"alpha * delta phi12", {}, {}, "line"};
  double total = 0.0;
  double prev = twobody::relative_angle(traj.r1()[0], traj.r2()[0]);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const double angle = twobody::relative_angle(traj.r1()[k], traj.r2()[k]);
    total += core::mod_2pi(angle - prev);
    prev = angle;
    a.x.push_back(k * traj.dt());
    a.y.push_back(cfg.alpha * total);
  }
  acc.curves.push_back(a);
  out.series.push_back(acc);
  return out;
}

// --- cooper pair phase ------------------------------------------------------------

Outcome run_cooper_phase(const ScenarioConfig& c) {
  const UnitSystem u = c.units();
  const Charge q = charge_of(c);
  const double quanta = c.number("flux.quanta");
  const double phase = core::ab_phase(q, flux_of(c, quanta), u);

  // Flux in superconducting quanta hc/2e: trivial for pairs, not for electrons.
  double pair = 0.0;
  double electron = 0.0;
  for (int k = -5; k <= 5; ++k) {
    pair = std::max(pair, std::abs(core::mod_2pi(core::ab_phase(Charge::elementary(2.0, u), Flux::quanta(0.5 * k, u), u))));
    electron = std::max(electron, std::abs(core::mod_2pi(core::ab_phase(Charge::elementary(1.0, u), Flux::quanta(k, u), u))));
  }

  Outcome out;
  out.observables = {
      {"phase", phase},
      {"reduced_phase", core::mod_2pi(phase)},
      {"pair_residual", pair},
      {"electron_residual", electron},
  };

  Series s{"reduced_phase", "Reduced AB phase", "Phi / (hc/e)", "phase mod 2 pi", "", {}};
  Curve e{"q = e", {}, {}, "line"};
  Curve p{"q = 2e", {}, {}, "line"};
  for (int k = 0; k <= 400; ++k) {
    const double f = -2.0 + k / 100.0;
    e.x.push_back(f);
    e.y.push_back(core::mod_2pi(core::ab_phase(Charge::elementary(1.0, u), Flux::quanta(f, u), u)));
    p.x.push_back(f);
    p.y.push_back(core::mod_2pi(core::ab_phase(Charge::elementary(2.0, u), Flux::quanta(f, u), u)));
  }
  s.curves = {e, p};
  out.series.push_back(s);
  return out;
}

// --- lattice kinds ------------------------------------------------------------------

double number_or(const ScenarioConfig& c, const std::string& path, double fallback) {
  return c.has(path) ? c.number(path) : fallback;
}

bool flag_or(const ScenarioConfig& c, const std::string& path, bool fallback) {
  return c.has(path) ? c.flag(path) : fallback;
}

lattice::InterferometerConfig interferometer_config(const ScenarioConfig& c) {
  lattice::InterferometerConfig cfg;
  cfg.nx = static_cast<int>(c.integer("numerics.nx"));
  cfg.ny = static_cast<int>(c.integer("numerics.ny"));
  cfg.a = c.number("numerics.a");
  cfg.mass = c.number("particle.mass");
  cfg.units = c.units();
  cfg.charge = charge_of(c);
  cfg.flux = flux_of(c, number_or(c, "flux.quanta", 0.0));
  cfg.mask_radius = c.number("geometry.mask_radius");
  cfg.path_radius = c.number("geometry.path_radius");
  cfg.trap_omega = c.number("trap.omega");
  cfg.duration = c.number("numerics.duration");
  cfg.dt = c.number("numerics.dt");
  cfg.contact_strength = number_or(c, "contact.strength", 0.0);
  cfg.contact_length = number_or(c, "contact.length", cfg.contact_length);
  cfg.random_gauge = flag_or(c, "numerics.random_gauge", false);
  cfg.seed = c.seed;
  cfg.sample_every = static_cast<int>(c.integer("numerics.sample_every"));
  return cfg;
}

lattice::SourcelessConfig sourceless_config(const ScenarioConfig& c) {
  lattice::SourcelessConfig cfg;
  cfg.base = interferometer_config(c);
  cfg.patch_centre = {c.number("patch.x"), c.number("patch.y")};
  cfg.patch_size = static_cast<int>(c.integer("patch.size"));
  cfg.patch_flux = flux_of(c, c.number("patch.flux_quanta"));
  cfg.t_on = c.number("patch.t_on");
  cfg.t_off = c.number("patch.t_off");
  return cfg;
}

lattice::FlybyConfig flyby_config(const ScenarioConfig& c) {
  lattice::FlybyConfig cfg;
  cfg.nx = static_cast<int>(c.integer("numerics.nx"));
  cfg.ny = static_cast<int>(c.integer("numerics.ny"));
  cfg.a = c.number("numerics.a");
  cfg.mass = c.number("particle.mass");
  cfg.units = c.units();
  cfg.charge = charge_of(c);
  cfg.flux = flux_of(c, c.number("flux.quanta"));
  cfg.mask_radius = c.number("geometry.mask_radius");
  cfg.sigma = c.number("packet.sigma");
  cfg.k0 = c.number("packet.k0");
  cfg.offset = c.number("geometry.offset");
  cfg.start_y = c.number("geometry.start_y");
  cfg.duration = c.number("numerics.duration");
  cfg.dt = c.number("numerics.dt");
  cfg.random_gauge = c.flag("numerics.random_gauge");
  cfg.seed = c.seed;
  cfg.sample_every = static_cast<int>(c.integer("numerics.sample_every"));
  return cfg;
}

lattice::AnnulusConfig annulus_config(const ScenarioConfig& c) {
  lattice::AnnulusConfig cfg;
  cfg.nx = static_cast<int>(c.integer("numerics.nx"));
  cfg.ny = static_cast<int>(c.integer("numerics.ny"));
  cfg.a = c.number("numerics.a");
  cfg.mass = c.number("particle.mass");
  cfg.units = c.units();
  cfg.charge = charge_of(c);
  cfg.flux = flux_of(c, c.number("flux.quanta"));
  cfg.radius = c.number("geometry.radius");
  cfg.radial_omega = c.number("confinement.omega");
  cfg.half_width = c.number("geometry.half_width");
  cfg.levels = static_cast<int>(c.integer("numerics.levels"));
  cfg.random_gauge = c.flag("numerics.random_gauge");
  cfg.seed = c.seed;
  cfg.solver.tolerance = c.number("numerics.tolerance");
  cfg.solver.seed = c.seed;
  return cfg;
}

double norm_of(Vec2 v) { return std::hypot(v.x, v.y); }

void add_time_series(Outcome& out, const lattice::TimeSeries& ts, bool with_overlap, bool write_csv) {
  if (ts.empty()) return;
  std::map<std::string, Curve> path, norm, velocity;
  Curve phase{"arg <psi_L|psi_R>", {}, {}, "line"};
  for (const auto& s : ts) {
    auto& p = path.try_emplace(s.arm, Curve{s.arm, {}, {}, "line"}).first->second;
    p.x.push_back(s.position.x);
    p.y.push_back(s.position.y);
    auto& n = norm.try_emplace(s.arm, Curve{s.arm, {}, {}, "line"}).first->second;
    n.x.push_back(s.t);
    n.y.push_back(s.norm - 1.0);
    auto& v = velocity.try_emplace(s.arm, Curve{s.arm, {}, {}, "line"}).first->second;
    v.x.push_back(s.t);
    v.y.push_back(norm_of(s.velocity));
    if (with_overlap && s.arm == ts.front().arm) {
      phase.x.push_back(s.t);
      phase.y.push_back(s.overlap_phase);
    }
  }
  Series paths{"paths", "Packet centres", "x", "y", "flux-on run", {}};
  Series norms{"norm", "Norm deviation", "t", "||psi||^2 - 1", "", {}};
  for (auto& [arm, curve] : path) paths.curves.push_back(std::move(curve));
  Series speeds{"velocity", "Packet speed |<v>|", "t", "|<v>|", "", {}};
  for (auto& [arm, curve] : norm) norms.curves.push_back(std::move(curve));
  for (auto& [arm, curve] : velocity) speeds.curves.push_back(std::move(curve));
  out.series.push_back(paths);
  out.series.push_back(norms);
  out.series.push_back(speeds);
  if (with_overlap) {
    out.series.push_back({"overlap_phase", "Relative phase of the arms", "t", "arg <psi_L|psi_R>", "", {phase}});
  }
  if (write_csv) {
    std::ostringstream csv;
    lattice::write_time_series_csv(csv, ts);
    out.artifacts.push_back({"timeseries.csv", csv.str()});
  }
}

void add_snapshots(Outcome& out, const std::vector<lattice::NamedState>& finals, double t) {
  for (const auto& f : finals) {
    std::ostringstream bin(std::ios::binary);
    lattice::write_density_snapshot(bin, f.psi, t);
    out.artifacts.push_back({"snapshots/" + f.name + ".bin", bin.str()});
  }
}

void fringe_observables(Outcome& out, const lattice::FringeReport& r) {
  out.observables["shift"] = r.shift;
  out.observables["fringe_shift"] = r.fringe_shift;
  out.observables["expected_shift"] = r.expected;
  out.observables["overlap"] = std::min(r.overlap_on, r.overlap_off);
  out.observables["visibility"] = r.visibility;
  out.observables["norm_drift"] = r.norm_drift;
  out.observables["phase_on"] = r.phase_on;
  out.observables["phase_off"] = r.phase_off;

  Series fringe{"fringe", "Detector fringe profile", "detector phase", "I / <I>",
                "shift " + fmt(r.fringe_shift) + ", visibility " + fmt(r.visibility), {}};
  Curve on{"flux on", {}, {}, "line"};
  Curve off{"flux off", {}, {}, "line"};
  for (int k = 0; k <= 128; ++k) {
    const double phi = kTwoPi * k / 128.0;
    on.x.push_back(phi);
    on.y.push_back(1.0 + r.visibility * std::cos(phi + r.fringe_offset_on));
    off.x.push_back(phi);
    off.y.push_back(1.0 + r.visibility * std::cos(phi + r.fringe_offset_off));
  }
  fringe.curves = {on, off};
  out.series.push_back(fringe);
}

struct OutputFlags {
  bool timeseries;
  bool snapshots;
};

OutputFlags output_flags(const ScenarioConfig& c) {
  return {flag_or(c, "output.timeseries", false), flag_or(c, "output.snapshots", false)};
}

Outcome run_ab(const ScenarioConfig& c, int jobs) {
  const auto cfg = interferometer_config(c);
  const auto flags = output_flags(c);
  const auto sweep = sweep_of(c);
  Outcome out;
  if (sweep.empty()) {
    const auto r = lattice::interference_scenario(cfg);
    fringe_observables(out, r);
    add_time_series(out, r.series, true, flags.timeseries);
    if (flags.snapshots) add_snapshots(out, r.finals, cfg.duration);
    return out;
  }
  const auto s = lattice::interference_sweep(cfg, sweep, jobs);
  const std::size_t k = nearest(sweep, c.number("flux.quanta"));
  fringe_observables(out, s.points[k]);
  out.observables["slope"] = s.slope;
  out.observables["intercept"] = s.intercept;
  out.observables["fit_residual"] = s.residual;
  double worst = 0.0;
  for (const auto& p : s.points) worst = std::max(worst, std::abs(core::mod_2pi(p.shift - p.expected)));
  out.observables["max_shift_error"] = worst;

  Series fit{"sweep", "Interference shift against flux", "Phi / (hc/e)", "shift (unwrapped)",
             "slope " + fmt(s.slope) + ", expected " + fmt(kTwoPi * cfg.charge.in_elementary(cfg.units)), {}};
  Curve meas{"measured", s.flux_quanta, s.unwrapped_shift, "points"};
  Curve line{"fit", {}, {}, "line"};
  for (double f : s.flux_quanta) {
    line.x.push_back(f);
    line.y.push_back(s.intercept + s.slope * f);
  }
  fit.curves = {meas, line};
  out.series.push_back(fit);
  add_time_series(out, s.points[k].series, true, flags.timeseries);
  if (flags.snapshots) add_snapshots(out, s.points[k].finals, cfg.duration);
  return out;
}

Outcome run_sourceless(const ScenarioConfig& c) {
  const auto cfg = sourceless_config(c);
  const auto flags = output_flags(c);
  const auto r = lattice::sourceless_field_scenario(cfg);
  Outcome out;
  fringe_observables(out, r);
  out.observables["enclosed"] = cfg.enclosed() ? 1.0 : 0.0;
  add_time_series(out, r.series, true, flags.timeseries);
  if (flags.snapshots) add_snapshots(out, r.finals, cfg.base.duration);
  return out;
}

void flyby_observables(Outcome& out, const lattice::VelocityPhaseReport& r) {
  out.observables["phase_difference"] = r.phase_difference;
  out.observables["expected_phase"] = r.expected;
  out.observables["phase_left"] = r.phase_left;
  out.observables["phase_right"] = r.phase_right;
  out.observables["velocity_deviation"] = r.velocity_deviation;
  out.observables["mirror_asymmetry"] = r.mirror_asymmetry;
  out.observables["norm_drift"] = r.norm_drift;
}

Outcome run_flyby(const ScenarioConfig& c, int jobs) {
  const auto cfg = flyby_config(c);
  const auto flags = output_flags(c);
  const auto sweep = sweep_of(c);
  Outcome out;
  if (sweep.empty()) {
    const auto r = lattice::flyby_scenario(cfg);
    flyby_observables(out, r);
    add_time_series(out, r.series, false, flags.timeseries);
    if (flags.snapshots) add_snapshots(out, r.finals, cfg.duration);
    return out;
  }
  std::vector<lattice::VelocityPhaseReport> reports(sweep.size());
  parallel_for(sweep.size(), jobs, [&](std::size_t k) {
    auto member = cfg;
    member.flux = flux_of(c, sweep[k]);
    if (k != nearest(sweep, c.number("flux.quanta"))) member.sample_every = 0;
    reports[k] = lattice::flyby_scenario(member);
  });
  const std::size_t k = nearest(sweep, c.number("flux.quanta"));
  flyby_observables(out, reports[k]);
  double worst_v = 0.0, worst_mirror = 0.0, worst_drift = 0.0;
  for (const auto& r : reports) {
    worst_v = std::max(worst_v, r.velocity_deviation);
    worst_mirror = std::max(worst_mirror, r.mirror_asymmetry);
    worst_drift = std::max(worst_drift, r.norm_drift);
  }
  out.observables["velocity_deviation"] = worst_v;
  out.observables["mirror_asymmetry"] = worst_mirror;
  out.observables["norm_drift"] = worst_drift;

  Series ph{"sweep", "Flyby phase difference against flux", "Phi / (hc/e)", "phase (right - left)", "", {}};
  Curve meas{"measured", sweep, {}, "points"};
  Curve expect{"q Phi / hbar c", sweep, {}, "line"};
  Curve dv{"|dv| / |v|", sweep, {}, "points"};
  for (const auto& r : reports) {
    meas.y.push_back(r.phase_difference);
    expect.y.push_back(r.expected);
    dv.y.push_back(r.velocity_deviation);
  }
  ph.curves = {meas, expect};
  out.series.push_back(ph);
  out.series.push_back({"velocity_deviation", "Velocity change caused by the flux", "Phi / (hc/e)", "|v_on - v_off| / |v_off|", "", {dv}});
  add_time_series(out, reports[k].series, false, flags.timeseries);
  if (flags.snapshots) add_snapshots(out, reports[k].finals, cfg.duration);
  return out;
}

Outcome run_annulus(const ScenarioConfig& c, int jobs) {
  const auto base = annulus_config(c);
  const UnitSystem u = base.units;
  const double quanta = c.number("flux.quanta");
  auto sweep = sweep_of(c);
  const bool swept = !sweep.empty();
  if (!swept) sweep = {quanta};
  const double period = u.e() / base.charge.value();  // flux period in units of hc/e

  // Solve list: sweep members, the zero-flux reference and the shifted copy of `quanta`.
  std::vector<double> fluxes = sweep;
  fluxes.push_back(0.0);
  fluxes.push_back(quanta + period);
  std::vector<lattice::AnnulusSpectrum> spectra(fluxes.size());
  parallel_for(fluxes.size(), jobs, [&](std::size_t k) {
    auto cfg = base;
    cfg.flux = Flux::quanta(fluxes[k], u);
    spectra[k] = lattice::annulus_spectrum(cfg);
  });
  const auto& reference = spectra[sweep.size()];
  const auto& shifted = spectra[sweep.size() + 1];
  const auto& at = spectra[nearest(sweep, quanta)];

  double periodicity = 0.0;
  for (std::size_t k = 0; k < at.energies.size(); ++k) {
    periodicity = std::max(periodicity, std::abs(shifted.energies[k] - at.energies[k]));
  }

  ring::RingConfig rc;
  rc.mass = base.mass;
  rc.radius = base.radius;
  rc.charge = base.charge;
  rc.units = u;
  auto ring_ground = [&](double q) { return sorted_energies(ring::spectrum(rc.with_flux(Flux::quanta(q, u))))[0]; };
  const double ring0 = ring_ground(0.0);
  double worst = 0.0, scale = 0.0;
  Series cmp{"ring_comparison", "Ground-state shift against flux", "Phi / (hc/e)", "E0(Phi) - E0(0)",
             "ring radius " + fmt(base.radius), {}};
  Curve lat{"lattice annulus", {}, {}, "points"};
  Curve ideal{"thin ring", {}, {}, "line"};
  for (std::size_t k = 0; k < sweep.size(); ++k) {
    const double dl = spectra[k].energies[0] - reference.energies[0];
    const double dr = ring_ground(sweep[k]) - ring0;
    worst = std::max(worst, std::abs(dl - dr));
    scale = std::max(scale, std::abs(dr));
    lat.x.push_back(sweep[k]);
    lat.y.push_back(dl);
  }
  for (int k = 0; k <= 100; ++k) {
    const double q = *std::min_element(sweep.begin(), sweep.end()) +
                     (*std::max_element(sweep.begin(), sweep.end()) - *std::min_element(sweep.begin(), sweep.end())) * k / 100.0;
    ideal.x.push_back(q);
    ideal.y.push_back(ring_ground(q) - ring0);
  }
  cmp.curves = {lat, ideal};

  Outcome out;
  out.observables = {
      {"ground_energy", at.energies[0]},
      {"degeneracy_splitting", at.energies.size() > 1 ? at.energies[1] - at.energies[0] : 0.0},
      {"periodicity_error", periodicity},
      {"ring_deviation", scale > 0.0 ? worst / scale : worst},
      {"max_residual", *std::max_element(at.residuals.begin(), at.residuals.end())},
      {"sites", static_cast<double>(at.sites)},
  };
  out.series.push_back(cmp);
  if (swept) {
    Series bands{"bands", "Annulus levels against flux", "Phi / (hc/e)", "E", "", {}};
    for (std::size_t level = 0; level < at.energies.size(); ++level) {
      Curve b{"level " + std::to_string(level), {}, {}, "line"};
      for (std::size_t k = 0; k < sweep.size(); ++k) {
        b.x.push_back(sweep[k]);
        b.y.push_back(spectra[k].energies[level]);
      }
      bands.curves.push_back(b);
    }
    out.series.push_back(bands);
  }
  return out;
}

Outcome run_charge_scaling(const ScenarioConfig& c, int jobs) {
  const auto base = interferometer_config(c);
  const auto flags = output_flags(c);
  const auto& lambdas = c.list("sweep.lambda");
  const auto r = lattice::charge_scaling_scenario(base, lambdas, jobs);

  double spread = 0.0, ratio_error = 0.0;
  Curve shift{"measured shift", {}, {}, "points"};
  Curve ratio{"deflection ratio", {}, {}, "points"};
  Curve square{"(lambda / lambda_0)^2", {}, {}, "line"};
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    const auto& p = r.points[k];
    spread = std::max(spread, std::abs(core::mod_2pi(p.fringe.shift - r.points[0].fringe.shift)));
    const double rel = p.lambda / r.points[0].lambda;
    ratio_error = std::max(ratio_error, std::abs(r.deflection_ratios[k] / (rel * rel) - 1.0));
    shift.x.push_back(p.lambda);
    shift.y.push_back(p.fringe.shift);
    ratio.x.push_back(p.lambda);
    ratio.y.push_back(r.deflection_ratios[k]);
    square.x.push_back(p.lambda);
    square.y.push_back(rel * rel);
  }

  // Closed-form check of the same scaling.
  const auto series = core::scaling_series(lambdas, base.charge, base.flux, base.units);
  double series_error = 0.0;
  for (const auto& s : series) {
    const double rel = s.lambda / series[0].lambda;
    series_error = std::max(series_error, std::abs(s.phase - series[0].phase));
    series_error = std::max(series_error, std::abs(s.force_metric / series[0].force_metric - rel * rel));
  }

  Outcome out;
  fringe_observables(out, r.points[0].fringe);
  out.observables["phase_spread"] = spread;
  out.observables["ratio_error"] = ratio_error;
  out.observables["scaling_series_error"] = series_error;
  out.observables["deflection"] = r.points[0].deflection;
  double min_overlap = 1.0;
  for (const auto& p : r.points) min_overlap = std::min({min_overlap, p.fringe.overlap_on, p.fringe.overlap_off});
  out.observables["overlap"] = min_overlap;

  out.series.push_back({"phase", "AB shift at fixed q Phi", "lambda", "shift", "", {shift}});
  out.series.push_back({"deflection", "Contact deflection ratio", "lambda", "ratio", "", {ratio, square}});
  add_time_series(out, r.points[0].fringe.series, true, flags.timeseries);
  if (flags.snapshots) add_snapshots(out, r.points[0].fringe.finals, base.duration);
  return out;
}

Outcome dispatch(const ScenarioConfig& c, int jobs) {
  const std::string& k = c.kind;
  if (k == "ring-spectrum") return run_ring_spectrum(c);
  if (k == "flux-ramp") return run_flux_ramp(c);
  if (k == "rotating-frame") return run_rotating_frame(c);
  if (k == "two-body-phase") return run_two_body(c);
  if (k == "cooper-phase") return run_cooper_phase(c);
  if (k == "ab-interference") return run_ab(c, jobs);
  if (k == "sourceless-field") return run_sourceless(c);
  if (k == "flyby") return run_flyby(c, jobs);
  if (k == "annulus-spectrum") return run_annulus(c, jobs);
  if (k == "charge-scaling") return run_charge_scaling(c, jobs);
  throw ConfigError("unknown kind '" + k + "'");
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw Error("cannot write '" + path.string() + "'");
}

}  // namespace

std::string resolve_out_dir(const ScenarioConfig& config, const std::optional<std::string>& cli_out) {
  if (cli_out && !cli_out->empty()) return *cli_out;
  if (config.has("output.dir") && !config.text("output.dir").empty()) return config.text("output.dir");
  if (const char* env = std::getenv("GAUGELAB_OUT"); env && *env) return env;
  return "gaugelab-out";
}

void preflight(const ScenarioConfig& c) {
  try {
    const std::string& k = c.kind;
    if (k == "ring-spectrum" || k == "flux-ramp") {
      ring_config(c).validate();
    } else if (k == "rotating-frame") {
      rotating::PolarGrid(c.number("geometry.r_inner"), c.number("geometry.r_outer"),
                          static_cast<int>(c.integer("numerics.radial_points")),
                          static_cast<int>(c.integer("numerics.angular_points")));
    } else if (k == "two-body-phase") {
      twobody::TwoBodyConfig{c.number("twobody.m1"), c.number("twobody.m2"), c.number("twobody.alpha")}.validate();
      two_body_trajectory(c);
    } else if (k == "ab-interference" || k == "charge-scaling") {
      interferometer_config(c).validate();
    } else if (k == "sourceless-field") {
      const auto cfg = sourceless_config(c);
      cfg.base.validate();
      cfg.patch();
    } else if (k == "flyby") {
      flyby_config(c).validate();
    } else if (k == "annulus-spectrum") {
      annulus_config(c).validate();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(c.kind + ": " + e.what());
  }
  if (c.kind == "ab-interference" && sweep_of(c).empty()) {
    for (const auto& e : c.expectations) {
      if (e.observable == "slope" || e.observable == "fit_residual") {
        throw ConfigError("expect." + e.observable + ": needs a flux sweep (sweep.flux_quanta)");
      }
    }
  }
}

std::string dump_report(const json& report) { return report.dump(2) + "\n"; }

RunResult run(const ScenarioConfig& input, const RunOptions& options) {
  ScenarioConfig config = input;
  if (options.seed) config.seed = *options.seed;
  preflight(config);

  const auto start = std::chrono::steady_clock::now();
  Outcome outcome = dispatch(config, std::max(1, options.jobs));
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  RunResult result;
  result.seconds = seconds;
  result.out_dir = resolve_out_dir(config, options.out_dir);

  json expectations = json::array();
  for (const auto& e : config.expectations) {
    const auto it = outcome.observables.find(e.observable);
    if (it == outcome.observables.end()) throw Error("observable '" + e.observable + "' was not produced");
    const bool circular = is_phase_observable(e.observable);
    const double deviation = circular ? std::abs(core::mod_2pi(it->second - e.target)) : std::abs(it->second - e.target);
    const bool pass = deviation <= e.tolerance();
    result.pass = result.pass && pass;
    expectations.push_back({{"observable", e.observable},
                            {"target", e.target},
                            {"tolerance", e.tolerance()},
                            {"observed", it->second},
                            {"deviation", deviation},
                            {"circular", circular},
                            {"pass", pass}});
  }

  json series = json::array();
  for (const auto& s : outcome.series) series.push_back(to_json(s));

  std::vector<std::string> files = {"report.json", "timing.json"};
  for (const auto& a : outcome.artifacts) files.push_back(a.name);

  json report = {
      {"format", "gaugelab-report"},
      {"version", 1},
      {"code_version", std::string(kCodeVersion)},
      {"kind", config.kind},
      {"seed", config.seed},
      {"config_hash", config_hash(config)},
      {"config", serialize(config)},
      {"observables", outcome.observables},
      {"expectations", expectations},
      {"pass", result.pass},
      {"series", series},
  };

  if (options.write_files) {
    const fs::path dir(result.out_dir);
    fs::create_directories(dir);
    for (const auto& a : outcome.artifacts) write_file(dir / a.name, a.content);
    if (flag_or(config, "output.plots", true) && !outcome.series.empty()) {
      for (const auto& name : write_plots(report, (dir / "plots").string())) files.push_back("plots/" + name);
    }
    report["files"] = files;
    write_file(dir / "report.json", dump_report(report));
    const json timing = {{"seconds", seconds}, {"jobs", std::max(1, options.jobs)}, {"config_hash", config_hash(config)}};
    write_file(dir / "timing.json", timing.dump(2) + "\n");
  } else {
    report["files"] = json::array();
  }
  result.files = files;
  result.report = std::move(report);
  return result;
}

}  // namespace gaugelab::cli
