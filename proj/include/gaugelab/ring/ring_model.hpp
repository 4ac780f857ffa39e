#pragma once

#include <complex>
#include <iosfwd>
#include <vector>

#include "gaugelab/core/units.hpp"

namespace gaugelab::ring {

using cplx = std::complex<double>;

/// A charged particle on a thin ring of radius R threaded by flux.
struct RingConfig {
  double mass = 1.0;
  double radius = 1.0;
  Flux flux{};
  Charge charge{};
  int mode_cutoff = 32;
  UnitSystem units{};

  void validate() const;
  /// Phi measured in flux quanta of *this* charge: q*Phi/(h c).
  double reduced_flux() const;
  /// hbar^2 / (2 m R^2)
  double energy_scale() const;
  RingConfig with_flux(Flux f) const;
};

/// Amplitudes over angular momentum modes n in [-N, N]; index n + N.
class RingState {
 public:
  RingState() = default;
  RingState(int cutoff, std::vector<cplx> amplitudes);

  static RingState pure(int cutoff, int n);

  int cutoff() const noexcept { return cutoff_; }
  const std::vector<cplx>& amplitudes() const noexcept { return amps_; }
  cplx amplitude(int n) const { return amps_.at(static_cast<std::size_t>(n + cutoff_)); }
  double occupation(int n) const { return std::norm(amplitude(n)); }
  double norm_squared() const;
  bool normalized(double tol = 1e-12) const;

 private:
  int cutoff_ = 0;
  std::vector<cplx> amps_;
};

struct Level {
  int n;
  double energy;
};

/// E_n = hbar^2/(2 m R^2) (n - q Phi / h c)^2 for every n in [-N, N], ordered by n.
std::vector<Level> spectrum(const RingConfig& cfg);

/// Lowest mode; exact ties go to smaller |n|, then to smaller n.
RingState ground_state(const RingConfig& cfg);
int ground_mode(const RingConfig& cfg);

/// <theta-dot> = sum |a_n|^2 hbar (n - Phi/Phi0) / (m R^2)
double angular_velocity(const RingConfig& cfg, const RingState& state);

/// -dE_n/dPhi, evaluated analytically.
double persistent_current(const RingConfig& cfg, int n);

/// Continuous flux protocol built from smooth pieces.
class FluxSchedule {
 public:
  enum class Shape { linear, smooth };

  struct Segment {
    double t_begin;
    double t_end;
    Flux begin;
    Flux end;
    Shape shape = Shape::smooth;
  };

  FluxSchedule(std::vector<Segment> segments, int resolution = 256);

  static FluxSchedule constant(Flux value, double duration, int resolution = 256);
  static FluxSchedule ramp(Flux from, Flux to, double duration, Shape shape = Shape::smooth, int resolution = 256);

  Flux at(double t) const;
  double duration() const noexcept { return segments_.back().t_end; }
  int resolution() const noexcept { return resolution_; }
  const std::vector<Segment>& segments() const noexcept { return segments_; }

 private:
  std::vector<Segment> segments_;
  int resolution_;
};

/// Evolve under the time-dependent ring Hamiltonian. H(t) is diagonal in n, so
/// each amplitude only acquires the phase -(1/hbar) * integral of E_n(t) dt,
/// computed per segment by adaptive Gauss-Kronrod quadrature. `cfg.flux` is
/// ignored; the schedule supplies Phi(t).
RingState evolve_ramp(const RingConfig& cfg, const RingState& initial, const FluxSchedule& schedule);

/// Start from the field-free ground state, ramp the flux, and compare with the
/// ground state of the final Hamiltonian.
struct AdiabaticOutcome {
  RingState ramped;
  int ramped_mode;
  double ramped_energy;
  double ramped_velocity;
  int ground_mode;
  double ground_energy;
  double ground_velocity;
};
AdiabaticOutcome adiabatic_rule(const RingConfig& cfg, const FluxSchedule& schedule);

/// CSV with a versioned header and columns n,energy,current.
void write_spectrum_csv(std::ostream& os, const RingConfig& cfg);

}  // namespace gaugelab::ring
