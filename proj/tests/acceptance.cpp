// Acceptance checks 1-10. Prints one PASS/FAIL line per criterion; exit status
// is nonzero if any selected criterion fails. Usage: acceptance [ids...]

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gaugelab/cli/config.hpp"
#include "gaugelab/cli/runner.hpp"
#include "gaugelab/core/phase.hpp"
#include "gaugelab/lattice/scenarios.hpp"
#include "gaugelab/ring/ring_model.hpp"
#include "gaugelab/rotating/rotating_frame.hpp"
#include "gaugelab/twobody/two_body.hpp"

using namespace gaugelab;

namespace {

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  /// Record one measured quantity against its bound.
  void check(const std::string& what, double value, double bound, bool strict = false) {
    const bool ok = strict ? value < bound : value <= bound;
    pass = pass && ok;
    detail << "\n      " << (ok ? "ok  " : "BAD ") << what << " = " << value << (strict ? " < " : " <= ") << bound;
  }
  void note(const std::string& text) { detail << "\n      " << text; }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

/// Circular distance between two angles.
double angle_error(double a, double b) { return std::abs(core::mod_2pi(a - b)); }

// 1 -------------------------------------------------------------------------------

Verdict topological_phase() {
  Verdict v;
  const auto t0 = Clock::now();
  const twobody::TwoBodyConfig cfg{1.0, 1.0, 0.5};
  v.check("|phase(one CCW loop) - pi|", std::abs(twobody::encircling_phase(cfg, twobody::orbit_trajectory({}, 1.0, 1, 256)) - kPi), 1e-9);

  double worst = 0.0;
  for (int w = -3; w <= 3; ++w) {
    const double phase = twobody::encircling_phase(cfg, twobody::orbit_trajectory({0.2, -0.1}, 1.5, w, 256));
    worst = std::max(worst, std::abs(phase - kTwoPi * cfg.alpha * w));
  }
  v.check("max_w |phase(w loops) - 2 pi alpha w|, w in [-3, 3]", worst, 1e-9);

  // Deformed loop: both particles move, the relative radius wobbles.
  std::vector<Vec2> r1, r2;
  const int n = 4000;
  for (int k = 0; k <= n; ++k) {
    const double t = kTwoPi * k / n;
    const Vec2 c{0.3 * std::sin(t), 0.2 * std::cos(2 * t)};
    const double r = 1.0 + 0.4 * std::sin(3 * t);
    r1.push_back(c);
    r2.push_back(c + Vec2{r * std::cos(t), r * std::sin(t)});
  }
  const auto deformed = twobody::TwoBodyTrajectory::from_positions(1.0 / n, r1, r2);
  const double base = twobody::encircling_phase(cfg, twobody::orbit_trajectory({}, 1.0, 1, 256));
  v.check("|phase(deformed loop) - phase(circle)|", std::abs(twobody::encircling_phase(cfg, deformed) - base), 1e-9);
  v.check("|phase(translated deformed loop) - phase(circle)|",
          std::abs(twobody::encircling_phase(cfg, deformed.translated({4.0, -3.0})) - base), 1e-9);
  v.check("runtime [s]", seconds_since(t0), 1.0, true);
  return v;
}

// 2 -------------------------------------------------------------------------------

Verdict ring_flux_physics() {
  Verdict v;
  const auto t0 = Clock::now();
  ring::RingConfig cfg;
  const UnitSystem& u = cfg.units;
  auto at = [&](double q) { return cfg.with_flux(Flux::quanta(q, u)); };

  double periodic = 0.0;
  for (double q = -1.0; q <= 1.0; q += 0.05) {
    const auto a = ring::spectrum(at(q));
    const auto b = ring::spectrum(at(q + 1.0));
    for (std::size_t k = 0; k + 1 < a.size(); ++k) periodic = std::max(periodic, std::abs(b[k + 1].energy - a[k].energy));
  }
  v.check("max |E_{n+1}(Phi + Phi0) - E_n(Phi)|", periodic, 1e-12);

  const auto half = ring::spectrum(at(0.5));
  const double e0 = half[static_cast<std::size_t>(cfg.mode_cutoff)].energy;
  const double e1 = half[static_cast<std::size_t>(cfg.mode_cutoff + 1)].energy;
  v.check("|E_0 - E_1| at Phi0/2", std::abs(e0 - e1), 1e-12);

  const auto schedule = ring::FluxSchedule::ramp(Flux(0.0), Flux::quanta(0.5, u), 10.0);
  const auto initial = ring::RingState::pure(cfg.mode_cutoff, 0);
  const auto ramped = ring::evolve_ramp(cfg, initial, schedule);
  double occ = 0.0;
  for (int n = -cfg.mode_cutoff; n <= cfg.mode_cutoff; ++n) {
    occ = std::max(occ, std::abs(ramped.occupation(n) - initial.occupation(n)));
  }
  v.check("max_n |occupation change| over the ramp 0 -> Phi0/2", occ, 1e-12);

  // Oracle: Dormand-Prince integration of i hbar da_n/dt = E_n(Phi(t)) a_n.
  const int size = 2 * cfg.mode_cutoff + 1;
  std::vector<double> y(2 * size, 0.0);
  y[2 * cfg.mode_cutoff] = 1.0;
  auto rhs = [&](const std::vector<double>& s, std::vector<double>& ds, double t) {
    const auto levels = ring::spectrum(cfg.with_flux(schedule.at(t)));
    for (int k = 0; k < size; ++k) {
      const double w = levels[k].energy / u.hbar();
      ds[2 * k] = w * s[2 * k + 1];
      ds[2 * k + 1] = -w * s[2 * k];
    }
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-12, 1e-12, ode::runge_kutta_dopri5<std::vector<double>>()), rhs, y,
                          0.0, schedule.duration(), 1e-3);
  std::vector<ring::cplx> amps(size);
  for (int k = 0; k < size; ++k) amps[k] = {y[2 * k], y[2 * k + 1]};
  double norm = 0.0;
  for (const auto& a : amps) norm += std::norm(a);
  for (auto& a : amps) a /= std::sqrt(norm);
  const ring::RingConfig end = at(0.5);
  const double oracle = ring::angular_velocity(end, ring::RingState(cfg.mode_cutoff, amps));
  const double model = ring::angular_velocity(end, ramped);
  const double target = -u.hbar() / (2.0 * cfg.mass * cfg.radius * cfg.radius);
  v.check("|<theta-dot> - (-hbar / 2 m R^2)|", std::abs(model - target), 1e-9);
  v.check("|<theta-dot> - time-evolution oracle|", std::abs(model - oracle), 1e-9);
  v.check("runtime [s]", seconds_since(t0), 1.0, true);
  return v;
}

// 3 -------------------------------------------------------------------------------

Verdict rotating_frame() {
  Verdict v;
  const auto t0 = Clock::now();
  using namespace rotating;
  const PolarGrid grid(0.0, 8.0, 256, 32);
  const Particle particle{1.0, {}};
  const RadialPotential trap = [](double r) { return 0.5 * r * r; };
  const double omega = 0.3;
  const auto h = build_hamiltonian(grid, particle, trap);
  const auto lz = build_angular_momentum(grid, particle.units);
  const auto frame = transform_hamiltonian(h, lz, omega, 2024);
  v.check("UHU^dagger = H commutator residual (20 probes)", frame.commutator_residual, 1e-8, true);
  const auto trials = trial_states(grid, 20, 2024);
  v.check("expanded-form relative residual (20 seeded states)",
          expanded_form_residual(h, lz, omega, particle, trap, trials, ExpansionRoute::polar), 1e-8, true);
  double shift = 0.0;
  for (const auto& s : joint_eigenstates(grid, particle, trap, 10)) {
    const StateVector r = frame.hamiltonian.apply(s.state) - (s.energy - s.n * particle.units.hbar() * omega) * s.state;
    shift = std::max(shift, r.norm());
  }
  v.check("max ||H' psi - (E - n hbar omega) psi|| over 10 lowest joint states", shift, 1e-8);
  v.check("runtime [s] at M_r = 256", seconds_since(t0), 30.0, true);
  return v;
}

// 4 -------------------------------------------------------------------------------

lattice::InterferometerConfig interferometer() {
  lattice::InterferometerConfig cfg;  // 256 x 256, a = 1, T = 800, dt = 0.5
  return cfg;
}

Verdict ab_interference() {
  Verdict v;
  const UnitSystem u;
  const std::vector<double> fluxes = {0.0, 0.125, 0.25, 0.375, 0.5, 0.625, 0.75, 0.875};
  auto t0 = Clock::now();
  const auto sweep = lattice::interference_sweep(interferometer(), fluxes, 1);
  const double per_point = seconds_since(t0) / static_cast<double>(fluxes.size() + 1);
  v.check("|slope / (2 pi / Phi0) - 1|, 256 x 256 sweep", std::abs(sweep.slope / kTwoPi - 1.0), 0.02);
  v.note("slope = " + std::to_string(sweep.slope) + ", fit rms residual = " + std::to_string(sweep.residual));
  const auto& halfway = sweep.points[4];
  v.check("|shift(Phi0/2) - pi| / pi", angle_error(halfway.shift, kPi) / kPi, 0.02);
  v.check("|fringe shift(Phi0/2) - pi| / pi", angle_error(halfway.fringe_shift, kPi) / kPi, 0.02);
  double drift = 0.0;
  for (const auto& p : sweep.points) drift = std::max(drift, p.norm_drift);
  v.check("norm drift per 1000 steps", drift, 1e-10, true);

  // Same run in a random gauge: every observable must agree.
  auto plain = interferometer();
  plain.flux = Flux::quanta(0.3, u);
  auto gauged = plain;
  gauged.random_gauge = true;
  gauged.seed = 77;
  const auto a = lattice::interference_scenario(plain);
  const auto b = lattice::interference_scenario(gauged);
  const double diffs[] = {
      std::abs(a.shift - b.shift),         std::abs(a.phase_on - b.phase_on),
      std::abs(a.phase_off - b.phase_off), std::abs(a.overlap_on - b.overlap_on),
      std::abs(a.overlap_off - b.overlap_off), std::abs(a.fringe_shift - b.fringe_shift),
      std::abs(a.visibility - b.visibility), std::abs(a.norm_drift - b.norm_drift),
      norm(a.right_final_on - b.right_final_on), norm(a.right_final_off - b.right_final_off),
  };
  v.check("max observable change under a random gauge (Phi = 0.3 Phi0)", *std::max_element(std::begin(diffs), std::end(diffs)), 1e-12,
          true);
  v.check("runtime per sweep point [s]", per_point, 600.0);
  return v;
}

// 5 -------------------------------------------------------------------------------

Verdict sourceless_field() {
  Verdict v;
  const UnitSystem u;
  lattice::SourcelessConfig cfg;
  cfg.base = interferometer();
  cfg.base.mask_radius = 0.0;
  cfg.patch_centre = {0.0, 0.0};
  cfg.patch_flux = Flux::quanta(0.5, u);
  auto t0 = Clock::now();
  const auto inside = lattice::sourceless_field_scenario(cfg);
  v.check("|shift - pi| / pi, enclosed B Area = Phi0/2", angle_error(inside.shift, kPi) / kPi, 0.03);
  auto outside_cfg = cfg;
  outside_cfg.patch_centre = {95.0, 0.0};
  const auto outside = lattice::sourceless_field_scenario(outside_cfg);
  v.note(std::string("outside patch enclosed by the arms: ") + (outside_cfg.enclosed() ? "yes" : "no"));
  v.check("|shift|, non-enclosing patch (noise floor 1e-6 rad)", std::abs(outside.shift), 1e-6);
  v.check("runtime [s]", seconds_since(t0), 600.0);
  return v;
}

// 6 -------------------------------------------------------------------------------

Verdict flyby() {
  Verdict v;
  const UnitSystem u;
  auto t0 = Clock::now();
  double worst_v = 0.0;
  for (double q : {0.25, 0.5, 0.75, 1.0}) {
    lattice::FlybyConfig cfg;
    cfg.flux = Flux::quanta(q, u);
    const auto r = lattice::flyby_scenario(cfg);
    worst_v = std::max(worst_v, r.velocity_deviation);
    if (q == 0.5) {
      v.check("|phase difference(Phi0/2) - pi| / pi", angle_error(r.phase_difference, kPi) / kPi, 0.02);
    }
  }
  v.check("max relative velocity deviation from flux-off, Phi/Phi0 in {1/4, 1/2, 3/4, 1}", worst_v, 1e-3, true);
  v.check("runtime [s]", seconds_since(t0), 600.0);
  return v;
}

// 7 -------------------------------------------------------------------------------

Verdict charge_scaling() {
  Verdict v;
  const UnitSystem u;
  auto base = interferometer();
  base.flux = Flux::quanta(0.5, u);
  base.contact_strength = 0.1;  // linear-response regime; at 0.5 the deflection is visibly nonlinear in g
  base.contact_length = 12.0;
  const std::vector<double> lambdas = {1.0, 0.5, 0.25};
  auto t0 = Clock::now();
  const auto r = lattice::charge_scaling_scenario(base, lambdas, 1);
  double spread = 0.0, ratio = 0.0;
  for (std::size_t k = 0; k < r.points.size(); ++k) {
    spread = std::max(spread, angle_error(r.points[k].fringe.shift, r.points[0].fringe.shift));
    ratio = std::max(ratio, std::abs(r.deflection_ratios[k] / (lambdas[k] * lambdas[k]) - 1.0));
    v.note("lambda = " + std::to_string(lambdas[k]) + ": shift " + std::to_string(r.points[k].fringe.shift) +
           ", deflection " + std::to_string(r.points[k].deflection));
  }
  v.check("max phase change across lambda, relative to pi", spread / kPi, 0.02);
  v.check("max |deflection ratio / lambda^2 - 1|", ratio, 0.10);
  const auto series = core::scaling_series(lambdas, base.charge, base.flux, u);
  double exact = 0.0;
  for (const auto& s : series) {
    exact = std::max(exact, std::abs(s.phase - series[0].phase));
    exact = std::max(exact, std::abs(s.force_metric / series[0].force_metric - s.lambda * s.lambda));
  }
  v.check("scaling_series deviation", exact, 1e-12);
  v.check("runtime [s]", seconds_since(t0), 900.0);
  return v;
}

// 8 -------------------------------------------------------------------------------

Verdict cooper_pair() {
  Verdict v;
  const UnitSystem u;
  double worst = 0.0;
  for (int k = -5; k <= 5; ++k) {
    // k superconducting quanta hc/2e = k/2 electron quanta.
    worst = std::max(worst, std::abs(core::mod_2pi(core::ab_phase(Charge::elementary(2.0, u), Flux::quanta(0.5 * k, u), u))));
  }
  v.check("max_k |ab_phase(2e, k hc/2e) mod 2 pi|, k in [-5, 5] (exact)", worst, 0.0);
  const double electron = core::mod_2pi(core::ab_phase(Charge::elementary(1.0, u), Flux::quanta(0.5, u), u));
  v.check("|ab_phase(e, hc/2e) mod 2 pi - pi| (exact)", std::abs(electron - kPi), 0.0);
  return v;
}

// 9 -------------------------------------------------------------------------------

Verdict annulus_vs_ring() {
  Verdict v;
  const UnitSystem u;
  lattice::AnnulusConfig cfg;  // 200 x 200 at a = 0.5, R = 40
  std::vector<double> fluxes;
  for (int k = 0; k <= 8; ++k) fluxes.push_back(k / 8.0);
  ring::RingConfig rc;
  rc.radius = cfg.radius;
  auto t0 = Clock::now();
  std::vector<double> lat;
  for (double q : fluxes) {
    auto c = cfg;
    c.flux = Flux::quanta(q, u);
    c.levels = 2;
    lat.push_back(lattice::annulus_spectrum(c).energies[0]);
  }
  auto ring_e0 = [&](double q) {
    const auto levels = ring::spectrum(rc.with_flux(Flux::quanta(q, u)));
    double e = levels[0].energy;
    for (const auto& l : levels) e = std::min(e, l.energy);
    return e;
  };
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < fluxes.size(); ++k) {
    const double dl = lat[k] - lat[0];
    const double dr = ring_e0(fluxes[k]) - ring_e0(0.0);
    worst = std::max(worst, std::abs(dl - dr));
    scale = std::max(scale, std::abs(dr));
  }
  v.check("max |dE_lattice - dE_ring| / max |dE_ring| over Phi in [0, Phi0], R_eff = 40", worst / scale, 0.02);
  v.note("runtime " + std::to_string(seconds_since(t0)) + " s");
  return v;
}

// 10 ------------------------------------------------------------------------------

// Ends inside [numerics] so callers can append more numerics keys.
const char* kSmallLattice = R"(
[geometry]
path_radius = 24
mask_radius = 6
[numerics]
nx = 112
ny = 112
duration = 320
)";

std::vector<std::pair<std::string, std::string>> determinism_configs() {
  return {
      {"ring-spectrum", "kind = ring-spectrum\n[flux]\nquanta = 0.3\n[sweep]\nflux_quanta = 0, 0.5, 1\n"},
      {"flux-ramp", "kind = flux-ramp\n[flux]\nquanta = 0.5\n"},
      {"rotating-frame", "kind = rotating-frame\nseed = 5\n[numerics]\nradial_points = 64\n"},
      {"two-body-phase", "kind = two-body-phase\n[twobody]\nloops = 2\n"},
      {"cooper-phase", "kind = cooper-phase\n[flux]\nquanta = 0.5\n"},
      {"ab-interference", std::string("kind = ab-interference\nseed = 9\n[flux]\nquanta = 0.3\n[sweep]\n"
                                      "flux_quanta = 0, 0.3\n") + kSmallLattice + "random_gauge = true\n"},
      {"sourceless-field", std::string("kind = sourceless-field\n[patch]\nsize = 5\n") + kSmallLattice},
      {"flyby", "kind = flyby\nseed = 2\n[numerics]\nnx = 128\nny = 128\nduration = 84\nrandom_gauge = true\n"
                "[geometry]\nmask_radius = 4\noffset = 28\nstart_y = -35\n[packet]\nsigma = 5\n[sweep]\n"
                "flux_quanta = 0.25, 0.5\n"},
      {"annulus-spectrum", "kind = annulus-spectrum\n[numerics]\nnx = 100\nny = 100\nlevels = 3\n[geometry]\n"
                           "radius = 18\nhalf_width = 6\n[sweep]\nflux_quanta = 0, 0.5\n"},
      {"charge-scaling", std::string("kind = charge-scaling\n[sweep]\nlambda = 1, 0.5\n") + kSmallLattice},
  };
}

Verdict determinism() {
  Verdict v;
  int identical = 0, total = 0;
  for (const auto& [kind, text] : determinism_configs()) {
    const cli::ScenarioConfig cfg = cli::parse_config(text);
    cli::RunOptions a, b;
    a.write_files = b.write_files = false;
    b.jobs = 3;  // worker count must not matter either
    const std::string first = cli::dump_report(cli::run(cfg, a).report);
    const std::string second = cli::dump_report(cli::run(cfg, b).report);
    const bool same = first == second;
    identical += same ? 1 : 0;
    ++total;
    v.note(kind + ": " + (same ? "identical" : "DIFFERENT") + " (" + std::to_string(first.size()) + " bytes)");
  }
  v.check("kinds with differing reruns", total - identical, 0.0);
  return v;
}

struct Criterion {
  int id;
  const char* title;
  std::function<Verdict()> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "topological phase", topological_phase},
      {2, "ring flux physics", ring_flux_physics},
      {3, "rotating frame", rotating_frame},
      {4, "lattice AB interference", ab_interference},
      {5, "sourceless field", sourceless_field},
      {6, "flyby", flyby},
      {7, "charge scaling", charge_scaling},
      {8, "Cooper-pair arithmetic", cooper_pair},
      {9, "annulus vs ring model", annulus_vs_ring},
      {10, "determinism", determinism},
  };
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v.pass = false;
      v.note(std::string("exception: ") + e.what());
    }
    failed += v.pass ? 0 : 1;
    std::printf("[%s] criterion %d: %s (%.2f s)%s\n", v.pass ? "PASS" : "FAIL", c.id, c.title, seconds_since(t0),
                v.detail.str().c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
