#include "gaugelab/lattice/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <ostream>

#include "gaugelab/core/parallel.hpp"
#include "gaugelab/core/phase.hpp"
#include "gaugelab/lattice/propagator.hpp"

namespace gaugelab::lattice {

void write_time_series_csv(std::ostream& os, const TimeSeries& series) {
  os << "# gaugelab time-series v1\n";
  os << "t,arm,norm,x,y,vx,vy,overlap_phase\n";
  const auto old = os.precision(17);
  for (const auto& s : series) {
    os << s.t << ',' << s.arm << ',' << s.norm << ',' << s.position.x << ',' << s.position.y << ',' << s.velocity.x
       << ',' << s.velocity.y << ',' << s.overlap_phase << '\n';
  }
  os.precision(old);
}

namespace {

double minimum_jerk(double u) {
  u = std::clamp(u, 0.0, 1.0);
  return u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
}

/// Plaquette containing the point p.
Plaquette plaquette_at(const Lattice2D& lat, Vec2 p) {
  const Plaquette q{static_cast<int>(std::floor((p.x - lat.origin.x) / lat.a)),
                    static_cast<int>(std::floor((p.y - lat.origin.y) / lat.a))};
  if (!lat.valid_plaquette(q.i, q.j)) throw InvalidArgument("point lies outside the lattice");
  return q;
}

// Distance from the centre to the nearest edge of a centred lattice.
double half_extent(const Lattice2D& lat) { return 0.5 * (std::min(lat.nx, lat.ny) - 1) * lat.a; }

double norm_drift_per_1000(double drift, long steps) { return drift * 1000.0 / static_cast<double>(std::max(steps, 1000L)); }

using LinkSelector = std::function<const LinkField&(double t)>;

struct ArmRun {
  Wavefunction2D right;
  std::optional<Wavefunction2D> left;
  TimeSeries series;
  double drift = 0.0;
};

PotentialGrid interferometer_potential(const InterferometerConfig& cfg) {
  const Lattice2D lat = cfg.lattice();
  PotentialGrid pot(lat);
  if (cfg.mask_radius > 0.0) pot.add_disc_wall({}, cfg.mask_radius);
  const double lambda = cfg.charge.in_elementary(cfg.units);
  const double g = cfg.contact_strength * lambda * lambda;
  if (g != 0.0) {
    for (int j = 0; j < lat.ny; ++j) {
      for (int i = 0; i < lat.nx; ++i) {
        if (pot.wall(i, j)) continue;
        const double r = norm(lat.position(i, j));
        pot.v(i, j) = g * std::exp(-(r - cfg.mask_radius) / cfg.contact_length);
      }
    }
  }
  return pot;
}

TimeSample sample(double t, const char* arm, const Wavefunction2D& psi, const LinkField& links, double mass,
                  const UnitSystem& units, double overlap_phase) {
  return {t, arm, psi.norm(), mean_position(psi), mean_velocity(psi, links, mass, units), overlap_phase};
}

ArmRun run_arms(const InterferometerConfig& cfg, const PotentialGrid& pot, const LinkSelector& links_at,
                const GaugeFunction* chi, bool with_left) {
  const Lattice2D lat = cfg.lattice();
  const double ell = std::sqrt(cfg.units.hbar() / (cfg.mass * cfg.trap_omega));
  Wavefunction2D psi0 = gaussian_packet(lat, cfg.trap_centre(+1, 0.0), ell / std::sqrt(2.0), {});
  apply_walls(psi0, pot);
  psi0.normalize();
  if (chi) psi0 = gauge_transform(psi0, *chi);

  Propagator pr(pot, cfg.mass, cfg.units, cfg.dt);
  std::optional<Propagator> pl;
  if (with_left) pl.emplace(pot, cfg.mass, cfg.units, cfg.dt);

  ArmRun run{psi0, std::nullopt, {}, 0.0};
  if (with_left) run.left = psi0;
  const double n0 = psi0.norm();
  const long steps = cfg.steps();
  const LinkField* current = nullptr;

  auto record = [&](double t) {
    const double phase = with_left ? std::arg(overlap(*run.left, run.right)) : 0.0;
    run.series.push_back(sample(t, "right", run.right, *current, cfg.mass, cfg.units, phase));
    if (with_left) run.series.push_back(sample(t, "left", *run.left, *current, cfg.mass, cfg.units, phase));
  };

  for (long k = 0; k < steps; ++k) {
    const double t = k * cfg.dt;
    const LinkField& links = links_at(t + 0.5 * cfg.dt);
    if (&links != current) {
      current = &links;
      pr.set_links(links);
      if (pl) pl->set_links(links);
    }
    if (k == 0 && cfg.sample_every > 0) record(0.0);
    const HarmonicTrap rb{cfg.trap_centre(+1, t), cfg.trap_omega};
    const HarmonicTrap re{cfg.trap_centre(+1, t + cfg.dt), cfg.trap_omega};
    pr.step(run.right, &rb, &re);
    if (pl) {
      const HarmonicTrap lb{cfg.trap_centre(-1, t), cfg.trap_omega};
      const HarmonicTrap le{cfg.trap_centre(-1, t + cfg.dt), cfg.trap_omega};
      pl->step(*run.left, &lb, &le);
    }
    if (cfg.sample_every > 0 && ((k + 1) % cfg.sample_every == 0 || k + 1 == steps)) record((k + 1) * cfg.dt);
  }
  double drift = std::abs(run.right.norm() - n0);
  if (run.left) drift = std::max(drift, std::abs(run.left->norm() - n0));
  run.drift = norm_drift_per_1000(drift, steps);
  return run;
}

struct FringeFit {
  double offset;
  double visibility;
};

/// Detector intensity I(phi) = sum over a disc of |psi_L + e^{i phi} psi_R|^2 a^2,
/// sampled at 16 phases and fitted with A + B cos(phi) + C sin(phi).
FringeFit fit_fringe(const Wavefunction2D& left, const Wavefunction2D& right, Vec2 centre, double radius) {
  const Lattice2D& lat = left.lattice();
  constexpr int kSamples = 16;
  double a0 = 0.0, b = 0.0, c = 0.0;
  for (int k = 0; k < kSamples; ++k) {
    const double phi = kTwoPi * k / kSamples;
    const cplx rot = std::polar(1.0, phi);
    double intensity = 0.0;
    for (int j = 0; j < lat.ny; ++j) {
      for (int i = 0; i < lat.nx; ++i) {
        if (norm(lat.position(i, j) - centre) > radius) continue;
        intensity += std::norm(left(i, j) + rot * right(i, j));
      }
    }
    intensity *= lat.a * lat.a;
    a0 += intensity / kSamples;
    b += 2.0 * intensity * std::cos(phi) / kSamples;
    c += 2.0 * intensity * std::sin(phi) / kSamples;
  }
  // I = A + 2|o| cos(phi + arg o)  =>  arg o = atan2(-C, B).
  return {std::atan2(-c, b), a0 > 0.0 ? std::hypot(b, c) / a0 : 0.0};
}

FringeReport assemble(const InterferometerConfig& cfg, const ArmRun& on, const ArmRun& off, double expected) {
  const cplx o_on = overlap(*on.left, on.right);
  const cplx o_off = overlap(*off.left, off.right);
  if (std::abs(o_on) < 0.1 || std::abs(o_off) < 0.1) {
    throw RecombinationError("interferometer arms failed to recombine: |<L|R>| = " + std::to_string(std::abs(o_on)) +
                             " (flux on), " + std::to_string(std::abs(o_off)) +
                             " (flux off); need >= 0.1. Slow the transport or stiffen the trap");
  }
  const Vec2 end = cfg.trap_centre(+1, cfg.duration);
  const double window = 3.0 * std::sqrt(cfg.units.hbar() / (cfg.mass * cfg.trap_omega));
  const FringeFit f_on = fit_fringe(*on.left, on.right, end, window);
  const FringeFit f_off = fit_fringe(*off.left, off.right, end, window);

  FringeReport r;
  r.expected = expected;
  r.phase_on = std::arg(o_on);
  r.phase_off = std::arg(o_off);
  r.shift = core::mod_2pi(r.phase_on - r.phase_off);
  r.overlap_on = std::abs(o_on);
  r.overlap_off = std::abs(o_off);
  r.fringe_shift = core::mod_2pi(f_on.offset - f_off.offset);
  r.fringe_offset_on = f_on.offset;
  r.fringe_offset_off = f_off.offset;
  r.visibility = f_on.visibility;
  r.norm_drift = std::max(on.drift, off.drift);
  r.steps = cfg.steps();
  r.right_final_on = mean_position(on.right);
  r.right_final_off = mean_position(off.right);
  r.series = on.series;
  r.finals = {{"left", *on.left}, {"right", on.right}};
  return r;
}

struct FluxLinks {
  LinkField off;
  LinkField on;
  std::optional<GaugeFunction> chi;
};

FluxLinks flux_links(const InterferometerConfig& cfg, const LinkField& on) {
  const Lattice2D lat = cfg.lattice();
  FluxLinks out{LinkField(lat), on, std::nullopt};
  if (cfg.random_gauge) {
    out.chi = random_gauge(lat, cfg.seed);
    out.off = gauge_transform(out.off, *out.chi);
    out.on = gauge_transform(out.on, *out.chi);
  }
  return out;
}

ArmRun run_static(const InterferometerConfig& cfg, const PotentialGrid& pot, const LinkField& links,
                  const GaugeFunction* chi, bool with_left) {
  return run_arms(cfg, pot, [&](double) -> const LinkField& { return links; }, chi, with_left);
}

}  // namespace

void InterferometerConfig::validate() const {
  const Lattice2D lat = lattice();
  if (!(mass > 0.0)) throw InvalidArgument("interferometer: mass must be > 0");
  if (!(trap_omega > 0.0)) throw InvalidArgument("interferometer: trap_omega must be > 0");
  if (!(duration > 0.0)) throw InvalidArgument("interferometer: duration must be > 0");
  if (!(mask_radius >= 0.0)) throw InvalidArgument("interferometer: mask_radius must be >= 0");
  if (!(contact_length > 0.0) || !(contact_strength >= 0.0)) {
    throw InvalidArgument("interferometer: contact_length must be > 0 and contact_strength >= 0");
  }
  if (sample_every < 0) throw InvalidArgument("interferometer: sample_every must be >= 0");
  check_time_step(dt, mass, a, units);
  const double ell = std::sqrt(units.hbar() / (mass * trap_omega));
  if (path_radius - mask_radius < 4.0 * ell) {
    throw InvalidArgument("interferometer: path_radius must clear the masked disc by 4 trap lengths");
  }
  if (path_radius + 6.0 * ell > half_extent(lat)) {
    throw InvalidArgument("interferometer: path plus 6 trap lengths does not fit inside the lattice");
  }
}

long InterferometerConfig::steps() const { return std::max(1L, std::lround(duration / dt)); }

Lattice2D InterferometerConfig::lattice() const { return Lattice2D::centered(nx, ny, a); }

Vec2 InterferometerConfig::trap_centre(int arm, double t) const {
  const double theta = -0.5 * kPi + arm * kPi * minimum_jerk(t / duration);
  return {path_radius * std::cos(theta), path_radius * std::sin(theta)};
}

FringeReport interference_scenario(const InterferometerConfig& cfg) {
  cfg.validate();
  const Lattice2D lat = cfg.lattice();
  const PotentialGrid pot = interferometer_potential(cfg);
  const FluxLinks links = flux_links(cfg, build_flux_links(lat, {plaquette_at(lat, {}), cfg.flux}, cfg.charge, cfg.units));
  const GaugeFunction* chi = links.chi ? &*links.chi : nullptr;
  const ArmRun off = run_static(cfg, pot, links.off, chi, true);
  const ArmRun on = run_static(cfg, pot, links.on, chi, true);
  return assemble(cfg, on, off, core::mod_2pi(core::ab_phase(cfg.charge, cfg.flux, cfg.units)));
}

SweepReport interference_sweep(const InterferometerConfig& base, std::span<const double> flux_quanta, int jobs) {
  if (flux_quanta.size() < 2) throw InvalidArgument("interference_sweep: need at least two flux values");
  base.validate();
  const Lattice2D lat = base.lattice();
  const PotentialGrid pot = interferometer_potential(base);
  const FluxLinks trivial = flux_links(base, LinkField(lat));
  const GaugeFunction* chi = trivial.chi ? &*trivial.chi : nullptr;
  const ArmRun off = run_static(base, pot, trivial.off, chi, true);

  SweepReport out;
  out.flux_quanta.assign(flux_quanta.begin(), flux_quanta.end());
  std::vector<std::optional<FringeReport>> points(flux_quanta.size());
  parallel_for(flux_quanta.size(), jobs, [&](std::size_t k) {
    InterferometerConfig cfg = base;
    cfg.flux = Flux::quanta(flux_quanta[k], cfg.units);
    const double expected = core::mod_2pi(core::ab_phase(cfg.charge, cfg.flux, cfg.units));
    if (flux_quanta[k] == 0.0) {
      points[k] = assemble(cfg, off, off, expected);
      return;
    }
    LinkField on = build_flux_links(lat, {plaquette_at(lat, {}), cfg.flux}, cfg.charge, cfg.units);
    if (chi) on = gauge_transform(on, *chi);
    points[k] = assemble(cfg, run_static(cfg, pot, on, chi, true), off, expected);
  });
  for (auto& p : points) {
    const double prev_raw = out.points.empty() ? 0.0 : out.points.back().shift;
    const double prev = out.unwrapped_shift.empty() ? 0.0 : out.unwrapped_shift.back();
    out.unwrapped_shift.push_back(out.points.empty() ? p->shift : prev + core::mod_2pi(p->shift - prev_raw));
    out.points.push_back(std::move(*p));
  }

  const double n = static_cast<double>(out.flux_quanta.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < out.flux_quanta.size(); ++k) {
    sx += out.flux_quanta[k];
    sy += out.unwrapped_shift[k];
    sxx += out.flux_quanta[k] * out.flux_quanta[k];
    sxy += out.flux_quanta[k] * out.unwrapped_shift[k];
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw InvalidArgument("interference_sweep: flux values must not all coincide");
  out.slope = (n * sxy - sx * sy) / denom;
  out.intercept = (sy - out.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t k = 0; k < out.flux_quanta.size(); ++k) {
    const double e = out.unwrapped_shift[k] - (out.intercept + out.slope * out.flux_quanta[k]);
    ss += e * e;
  }
  out.residual = std::sqrt(ss / n);
  return out;
}

UniformFieldPatch SourcelessConfig::patch() const {
  const Lattice2D lat = base.lattice();
  if (patch_size < 1) throw InvalidArgument("sourceless: patch_size must be >= 1");
  UniformFieldPatch p;
  p.i0 = static_cast<int>(std::lround((patch_centre.x - lat.origin.x) / lat.a - 0.5 - 0.5 * (patch_size - 1)));
  p.j0 = static_cast<int>(std::lround((patch_centre.y - lat.origin.y) / lat.a - 0.5 - 0.5 * (patch_size - 1)));
  p.i1 = p.i0 + patch_size;
  p.j1 = p.j0 + patch_size;
  p.field = patch_flux.value() / p.area(lat);
  p.t_on = t_on < 0.0 ? 0.25 * base.duration : t_on;
  p.t_off = t_off < 0.0 ? 0.75 * base.duration : t_off;
  p.validate(lat);
  return p;
}

bool SourcelessConfig::enclosed() const {
  const Lattice2D lat = base.lattice();
  const UniformFieldPatch p = patch();
  for (Vec2 corner : {Vec2{lat.x(p.i0), lat.y(p.j0)}, Vec2{lat.x(p.i1), lat.y(p.j0)}, Vec2{lat.x(p.i0), lat.y(p.j1)},
                      Vec2{lat.x(p.i1), lat.y(p.j1)}}) {
    if (norm(corner) >= base.path_radius) return false;
  }
  return true;
}

FringeReport sourceless_field_scenario(const SourcelessConfig& cfg) {
  cfg.base.validate();
  const Lattice2D lat = cfg.base.lattice();
  const UniformFieldPatch p = cfg.patch();
  const PotentialGrid pot = interferometer_potential(cfg.base);
  const FluxLinks links = flux_links(cfg.base, build_patch_links(lat, p, cfg.base.charge, cfg.base.units));
  const GaugeFunction* chi = links.chi ? &*links.chi : nullptr;

  const ArmRun off = run_static(cfg.base, pot, links.off, chi, true);
  const ArmRun on = run_arms(
      cfg.base, pot, [&](double t) -> const LinkField& { return p.active(t) ? links.on : links.off; }, chi, true);
  const bool counts = cfg.enclosed() && p.active(0.5 * cfg.base.duration);
  const double expected = counts ? core::mod_2pi(core::ab_phase(cfg.base.charge, cfg.patch_flux, cfg.base.units)) : 0.0;
  return assemble(cfg.base, on, off, expected);
}

void FlybyConfig::validate() const {
  const Lattice2D lat = lattice();
  if (!(mass > 0.0)) throw InvalidArgument("flyby: mass must be > 0");
  if (!(sigma > 0.0)) throw InvalidArgument("flyby: sigma must be > 0");
  if (!(duration > 0.0)) throw InvalidArgument("flyby: duration must be > 0");
  if (sample_every < 0) throw InvalidArgument("flyby: sample_every must be >= 0");
  check_time_step(dt, mass, a, units);
  if (std::abs(offset) - mask_radius < 3.0 * sigma) {
    throw InvalidArgument("flyby: packet course passes within 3 sigma of the masked flux region");
  }
  if (std::abs(offset) + 5.0 * sigma > half_extent(lat) || std::abs(start_y) + 5.0 * sigma > half_extent(lat)) {
    throw InvalidArgument("flyby: initial packet does not fit 5 sigma inside the lattice");
  }
}

long FlybyConfig::steps() const { return std::max(1L, std::lround(duration / dt)); }

Lattice2D FlybyConfig::lattice() const { return Lattice2D::centered(nx, ny, a); }

VelocityPhaseReport flyby_scenario(const FlybyConfig& cfg) {
  cfg.validate();
  const Lattice2D lat = cfg.lattice();
  PotentialGrid pot(lat);
  pot.add_disc_wall({}, cfg.mask_radius);
  LinkField off(lat);
  LinkField on = build_flux_links(lat, {plaquette_at(lat, {}), cfg.flux}, cfg.charge, cfg.units);
  std::optional<GaugeFunction> chi;
  if (cfg.random_gauge) {
    chi = random_gauge(lat, cfg.seed);
    off = gauge_transform(off, *chi);
    on = gauge_transform(on, *chi);
  }

  VelocityPhaseReport r;
  r.steps = cfg.steps();
  r.expected = core::mod_2pi(core::ab_phase(cfg.charge, cfg.flux, cfg.units));
  std::vector<double> off_density[2];
  double drift = 0.0;
  for (int side = 0; side < 2; ++side) {
    const double x0 = side == 0 ? -cfg.offset : cfg.offset;
    const char* tag_on = side == 0 ? "left-on" : "right-on";
    const char* tag_off = side == 0 ? "left-off" : "right-off";
    Wavefunction2D psi0 = gaussian_packet(lat, {x0, cfg.start_y}, cfg.sigma, {0.0, cfg.k0});
    apply_walls(psi0, pot);
    psi0.normalize();
    if (chi) psi0 = gauge_transform(psi0, *chi);
    const double n0 = psi0.norm();

    Propagator p_on(pot, cfg.mass, cfg.units, cfg.dt);
    Propagator p_off(pot, cfg.mass, cfg.units, cfg.dt);
    p_on.set_links(on);
    p_off.set_links(off);
    Wavefunction2D psi_on = psi0, psi_off = psi0;
    const Vec2 v0 = mean_velocity(psi0, on, cfg.mass, cfg.units);
    (side == 0 ? r.v_before_left : r.v_before_right) = v0;
    auto record = [&](double t) {
      r.series.push_back(sample(t, tag_on, psi_on, on, cfg.mass, cfg.units, 0.0));
      r.series.push_back(sample(t, tag_off, psi_off, off, cfg.mass, cfg.units, 0.0));
    };
    if (cfg.sample_every > 0) record(0.0);
    for (long k = 0; k < r.steps; ++k) {
      p_on.step(psi_on);
      p_off.step(psi_off);
      if (cfg.sample_every > 0 && ((k + 1) % cfg.sample_every == 0 || k + 1 == r.steps)) record((k + 1) * cfg.dt);
    }
    drift = std::max({drift, std::abs(psi_on.norm() - n0), std::abs(psi_off.norm() - n0)});

    const double phase = std::arg(overlap(psi_off, psi_on));
    const Vec2 v_on = mean_velocity(psi_on, on, cfg.mass, cfg.units);
    const Vec2 v_off = mean_velocity(psi_off, off, cfg.mass, cfg.units);
    if (side == 0) {
      r.phase_left = phase;
      r.v_after_on_left = v_on;
      r.v_after_off_left = v_off;
    } else {
      r.phase_right = phase;
      r.v_after_on_right = v_on;
      r.v_after_off_right = v_off;
    }
    r.velocity_deviation = std::max(r.velocity_deviation, norm(v_on - v_off) / norm(v_off));
    off_density[side] = psi_off.density();
    r.finals.push_back({side == 0 ? "left" : "right", psi_on});
  }
  r.phase_difference = core::mod_2pi(r.phase_right - r.phase_left);
  r.norm_drift = norm_drift_per_1000(drift, r.steps);
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      const double d = std::abs(off_density[0][lat.index(i, j)] - off_density[1][lat.index(lat.nx - 1 - i, j)]);
      r.mirror_asymmetry = std::max(r.mirror_asymmetry, d);
    }
  }
  return r;
}

void AnnulusConfig::validate() const {
  const Lattice2D lat = lattice();
  if (!(mass > 0.0)) throw InvalidArgument("annulus: mass must be > 0");
  if (!(radial_omega > 0.0)) throw InvalidArgument("annulus: radial_omega must be > 0");
  if (!(half_width > 0.0) || !(radius > half_width)) throw InvalidArgument("annulus: need radius > half_width > 0");
  if (radius + half_width > half_extent(lat)) throw InvalidArgument("annulus: outer wall does not fit inside the lattice");
  if (levels < 1) throw InvalidArgument("annulus: levels must be >= 1");
}

Lattice2D AnnulusConfig::lattice() const { return Lattice2D::centered(nx, ny, a); }

AnnulusSpectrum annulus_spectrum(const AnnulusConfig& cfg) {
  cfg.validate();
  const Lattice2D lat = cfg.lattice();
  PotentialGrid pot(lat);
  pot.keep_annulus({}, cfg.radius - cfg.half_width, cfg.radius + cfg.half_width);
  const double k = 0.5 * cfg.mass * cfg.radial_omega * cfg.radial_omega;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      if (pot.wall(i, j)) continue;
      const double d = norm(lat.position(i, j)) - cfg.radius;
      pot.v(i, j) = k * d * d;
    }
  }
  LinkField links = build_flux_links(lat, {plaquette_at(lat, {}), cfg.flux}, cfg.charge, cfg.units);
  if (cfg.random_gauge) links = gauge_transform(links, random_gauge(lat, cfg.seed));
  const LatticeHamiltonian h = build_lattice_hamiltonian(links, pot, cfg.mass, cfg.units);
  const EigenPairs pairs = lowest_eigenpairs(h.matrix, cfg.levels, cfg.solver);
  return {pairs.values, pairs.residuals, pairs.iterations, h.sites.size()};
}

ChargeScalingReport charge_scaling_scenario(const InterferometerConfig& base, std::span<const double> lambdas,
                                            int jobs) {
  if (lambdas.empty()) throw InvalidArgument("charge_scaling: need at least one lambda");
  for (double l : lambdas) {
    if (!(l > 0.0)) throw InvalidArgument("charge_scaling: lambda must be > 0");
  }
  base.validate();

  InterferometerConfig bare = base;
  bare.contact_strength = 0.0;
  bare.sample_every = 0;
  const Lattice2D lat = bare.lattice();
  const ArmRun reference = run_static(bare, interferometer_potential(bare), LinkField(lat), nullptr, false);
  const double y_ref = mean_position(reference.right).y;

  ChargeScalingReport out;
  out.points.resize(lambdas.size());
  parallel_for(lambdas.size(), jobs, [&](std::size_t k) {
    InterferometerConfig cfg = base;
    cfg.charge = Charge(lambdas[k] * base.charge.value());
    cfg.flux = Flux(base.flux.value() / lambdas[k]);
    ChargeScalingPoint& p = out.points[k];
    p.lambda = lambdas[k];
    p.fringe = interference_scenario(cfg);
    p.deflection = p.fringe.right_final_off.y - y_ref;
  });
  for (const auto& p : out.points) {
    out.deflection_ratios.push_back(out.points.front().deflection != 0.0 ? p.deflection / out.points.front().deflection
                                                                         : 0.0);
  }
  return out;
}

}  // namespace gaugelab::lattice
