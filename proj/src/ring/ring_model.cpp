#include "gaugelab/ring/ring_model.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include "gaugelab/core/phase.hpp"

namespace gaugelab::ring {

void RingConfig::validate() const {
  if (!(mass > 0.0) || !std::isfinite(mass)) throw InvalidArgument("ring: mass must be finite and > 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw InvalidArgument("ring: radius must be finite and > 0");
  if (mode_cutoff < 1) throw InvalidArgument("ring: mode_cutoff must be >= 1");
}

double RingConfig::reduced_flux() const { return core::ab_phase(charge, flux, units) / kTwoPi; }

double RingConfig::energy_scale() const { return units.hbar() * units.hbar() / (2.0 * mass * radius * radius); }

RingConfig RingConfig::with_flux(Flux f) const {
  RingConfig out = *this;
  out.flux = f;
  return out;
}

RingState::RingState(int cutoff, std::vector<cplx> amplitudes) : cutoff_(cutoff), amps_(std::move(amplitudes)) {
  if (cutoff_ < 1) throw InvalidArgument("RingState: cutoff must be >= 1");
  if (amps_.size() != static_cast<std::size_t>(2 * cutoff_ + 1)) {
    throw InvalidArgument("RingState: expected 2N+1 = " + std::to_string(2 * cutoff_ + 1) + " amplitudes, got " +
                          std::to_string(amps_.size()));
  }
}

RingState RingState::pure(int cutoff, int n) {
  if (std::abs(n) > cutoff) throw InvalidArgument("RingState::pure: |n| exceeds the cutoff");
  std::vector<cplx> a(static_cast<std::size_t>(2 * cutoff + 1));
  a[static_cast<std::size_t>(n + cutoff)] = 1.0;
  return {cutoff, std::move(a)};
}

double RingState::norm_squared() const {
  double s = 0.0;
  for (const auto& a : amps_) s += std::norm(a);
  return s;
}

bool RingState::normalized(double tol) const { return std::abs(1.0 - norm_squared()) <= tol; }

std::vector<Level> spectrum(const RingConfig& cfg) {
  cfg.validate();
  const double f = cfg.reduced_flux();
  const double scale = cfg.energy_scale();
  std::vector<Level> levels;
  levels.reserve(static_cast<std::size_t>(2 * cfg.mode_cutoff + 1));
  for (int n = -cfg.mode_cutoff; n <= cfg.mode_cutoff; ++n) {
    const double k = n - f;
    levels.push_back({n, scale * k * k});
  }
  return levels;
}

int ground_mode(const RingConfig& cfg) {
  const auto levels = spectrum(cfg);
  const Level* best = &levels.front();
  for (const auto& l : levels) {
    if (l.energy < best->energy) {
      best = &l;
    } else if (l.energy == best->energy) {
      const bool closer = std::abs(l.n) < std::abs(best->n) || (std::abs(l.n) == std::abs(best->n) && l.n < best->n);
      if (closer) best = &l;
    }
  }
  return best->n;
}

RingState ground_state(const RingConfig& cfg) { return RingState::pure(cfg.mode_cutoff, ground_mode(cfg)); }

double angular_velocity(const RingConfig& cfg, const RingState& state) {
  cfg.validate();
  if (!state.normalized()) {
    throw InvalidArgument("angular_velocity: state is not normalized (|a|^2 sums to " +
                          std::to_string(state.norm_squared()) + ")");
  }
  const double f = cfg.reduced_flux();
  double acc = 0.0;
  for (int n = -state.cutoff(); n <= state.cutoff(); ++n) acc += state.occupation(n) * (n - f);
  return cfg.units.hbar() * acc / (cfg.mass * cfg.radius * cfg.radius);
}

double persistent_current(const RingConfig& cfg, int n) {
  cfg.validate();
  if (std::abs(n) > cfg.mode_cutoff) {
    throw InvalidArgument("persistent_current: |n| = " + std::to_string(std::abs(n)) + " exceeds cutoff " +
                          std::to_string(cfg.mode_cutoff));
  }
  // dE_n/dPhi = 2 E_scale (n - f) * (-df/dPhi), with df/dPhi = q / (h c).
  const double dfdphi = cfg.charge.value() / (cfg.units.planck() * cfg.units.c());
  return 2.0 * cfg.energy_scale() * (n - cfg.reduced_flux()) * dfdphi;
}

FluxSchedule::FluxSchedule(std::vector<Segment> segments, int resolution)
    : segments_(std::move(segments)), resolution_(resolution) {
  if (segments_.empty()) throw InvalidArgument("FluxSchedule: no segments");
  if (resolution_ < 2) throw InvalidArgument("FluxSchedule: resolution must be >= 2");
  if (segments_.front().t_begin != 0.0) throw InvalidArgument("FluxSchedule: must start at t = 0");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    const auto& s = segments_[i];
    if (!(s.t_end > s.t_begin)) throw InvalidArgument("FluxSchedule: segment " + std::to_string(i) + " has t_end <= t_begin");
    if (i == 0) continue;
    const auto& prev = segments_[i - 1];
    if (prev.t_end != s.t_begin) throw InvalidArgument("FluxSchedule: segments " + std::to_string(i - 1) + " and " + std::to_string(i) + " are not contiguous in time");
    const double jump = std::abs(prev.end.value() - s.begin.value());
    const double scale = std::max({1.0, std::abs(prev.end.value()), std::abs(s.begin.value())});
    if (jump > 1e-12 * scale) {
      throw InvalidArgument("FluxSchedule: flux is discontinuous at t = " + std::to_string(s.t_begin));
    }
  }
}

FluxSchedule FluxSchedule::constant(Flux value, double duration, int resolution) {
  return FluxSchedule({{0.0, duration, value, value, Shape::linear}}, resolution);
}

FluxSchedule FluxSchedule::ramp(Flux from, Flux to, double duration, Shape shape, int resolution) {
  return FluxSchedule({{0.0, duration, from, to, shape}}, resolution);
}

namespace {

double segment_value(const FluxSchedule::Segment& s, double t) {
  const double u = std::clamp((t - s.t_begin) / (s.t_end - s.t_begin), 0.0, 1.0);
  const double w = s.shape == FluxSchedule::Shape::linear ? u : 0.5 * (1.0 - std::cos(kPi * u));
  return s.begin.value() + (s.end.value() - s.begin.value()) * w;
}

}  // namespace

Flux FluxSchedule::at(double t) const {
  for (const auto& s : segments_) {
    if (t <= s.t_end) return Flux(segment_value(s, t));
  }
  return segments_.back().end;
}

RingState evolve_ramp(const RingConfig& cfg, const RingState& initial, const FluxSchedule& schedule) {
  cfg.validate();
  if (!initial.normalized()) throw InvalidArgument("evolve_ramp: initial state is not normalized");
  using boost::math::quadrature::gauss_kronrod;

  const double scale = cfg.energy_scale();
  const double q_over_hc = cfg.charge.value() / (cfg.units.planck() * cfg.units.c());
  const int N = initial.cutoff();
  std::vector<cplx> out(initial.amplitudes());
  for (int n = -N; n <= N; ++n) {
    double action = 0.0;
    for (const auto& seg : schedule.segments()) {
      auto energy = [&](double t) {
        const double k = n - q_over_hc * segment_value(seg, t);
        return scale * k * k;
      };
      action += gauss_kronrod<double, 15>::integrate(energy, seg.t_begin, seg.t_end, 12, 1e-14);
    }
    out[static_cast<std::size_t>(n + N)] *= std::polar(1.0, -action / cfg.units.hbar());
  }
  return {N, std::move(out)};
}

AdiabaticOutcome adiabatic_rule(const RingConfig& cfg, const FluxSchedule& schedule) {
  const RingConfig start = cfg.with_flux(schedule.at(0.0));
  const RingConfig finish = cfg.with_flux(schedule.at(schedule.duration()));
  const RingState initial = ground_state(start);
  RingState ramped = evolve_ramp(cfg, initial, schedule);

  int mode = -ramped.cutoff();
  for (int n = -ramped.cutoff(); n <= ramped.cutoff(); ++n) {
    if (ramped.occupation(n) > ramped.occupation(mode)) mode = n;
  }
  const auto levels = spectrum(finish);
  const int g = ground_mode(finish);
  double ramped_energy = 0.0;
  for (int n = -ramped.cutoff(); n <= ramped.cutoff(); ++n) {
    ramped_energy += ramped.occupation(n) * levels[static_cast<std::size_t>(n + finish.mode_cutoff)].energy;
  }
  const double ramped_velocity = angular_velocity(finish, ramped);
  return {std::move(ramped),
          mode,
          ramped_energy,
          ramped_velocity,
          g,
          levels[static_cast<std::size_t>(g + finish.mode_cutoff)].energy,
          angular_velocity(finish, ground_state(finish))};
}

void write_spectrum_csv(std::ostream& os, const RingConfig& cfg) {
  os << "# gaugelab ring-spectrum v1\n";
  os << "n,energy,current\n";
  os.precision(17);
  for (const auto& l : spectrum(cfg)) os << l.n << ',' << l.energy << ',' << persistent_current(cfg, l.n) << '\n';
}

}  // namespace gaugelab::ring
