#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gaugelab/lattice/eigensolver.hpp"
#include "gaugelab/lattice/lattice.hpp"

namespace gaugelab::lattice {

struct TimeSample {
  double t = 0.0;
  std::string arm;
  double norm = 0.0;
  Vec2 position{};
  Vec2 velocity{};
  double overlap_phase = 0.0;  ///< arg <psi_L | psi_R>, interferometers only
};
using TimeSeries = std::vector<TimeSample>;

/// Final wavefunction of one run, kept for snapshot output.
struct NamedState {
  std::string name;
  Wavefunction2D psi;
};

/// CSV with a versioned header: t,arm,norm,x,y,vx,vy,overlap_phase.
void write_time_series_csv(std::ostream& os, const TimeSeries& series);

/// Two-arm interferometer. A harmonic trap carries the packet from
/// (0, -R) to (0, +R) along either half of the circle of radius R, with a
/// minimum-jerk angular schedule; the right arm runs counterclockwise. The
/// flux line sits at the origin inside a hard-wall disc.
struct InterferometerConfig {
  int nx = 256;
  int ny = 256;
  double a = 1.0;
  double mass = 1.0;
  UnitSystem units{};
  Charge charge{};
  Flux flux{};
  double mask_radius = 12.0;  ///< 0 disables the wall disc
  double path_radius = 60.0;
  double trap_omega = 1.0 / 16.0;
  double duration = 800.0;
  double dt = 0.5;
  /// Repulsion g (q/e)^2 exp(-(r - mask_radius) / contact_length) outside the disc.
  double contact_strength = 0.0;
  double contact_length = 12.0;
  bool random_gauge = false;  ///< apply a random per-site gauge to links and state
  std::uint64_t seed = 0;
  int sample_every = 0;  ///< time-series cadence in steps; 0 records nothing

  void validate() const;
  long steps() const;
  Lattice2D lattice() const;
  /// Trap centre of the right (+1) or left (-1) arm at time t.
  Vec2 trap_centre(int arm, double t) const;
};

struct FringeReport {
  double expected = 0.0;       ///< enclosed AB phase, reduced to (-pi, pi]
  double phase_on = 0.0;       ///< arg <psi_L | psi_R> with flux
  double phase_off = 0.0;      ///< same without flux
  double shift = 0.0;          ///< phase_on - phase_off, reduced
  double overlap_on = 0.0;     ///< |<psi_L | psi_R>|
  double overlap_off = 0.0;
  double fringe_shift = 0.0;   ///< offset of the detector fringe fit, reduced
  double fringe_offset_on = 0.0;   ///< fit offset of each run; I ~ 1 + V cos(phi + offset)
  double fringe_offset_off = 0.0;
  double visibility = 0.0;
  double norm_drift = 0.0;     ///< worst |norm change| per 1000 steps
  long steps = 0;
  Vec2 right_final_on{};       ///< <r> of the right arm at recombination
  Vec2 right_final_off{};
  TimeSeries series;           ///< flux-on run
  std::vector<NamedState> finals;  ///< flux-on arms at recombination
};

/// Flux-on and flux-off runs of the interferometer.
/// Throws RecombinationError if |<psi_L | psi_R>| < 0.1 in either run.
FringeReport interference_scenario(const InterferometerConfig& cfg);

struct SweepReport {
  std::vector<double> flux_quanta;
  std::vector<FringeReport> points;
  std::vector<double> unwrapped_shift;
  double slope = 0.0;  ///< fitted d(shift)/d(Phi/Phi0)
  double intercept = 0.0;
  double residual = 0.0;  ///< rms residual of the linear fit
};

/// interference_scenario at each flux (in units of hc/e); the flux-off run is shared.
/// Sweep members run on up to `jobs` threads; results do not depend on it.
SweepReport interference_sweep(const InterferometerConfig& base, std::span<const double> flux_quanta, int jobs = 1);

/// A uniform field patch with no source, switched on for [t_on, t_off).
/// The links switch in string gauge, so the switching pulse lives on the cut
/// running along -x from the patch; the arms cross that line at T/2.
struct SourcelessConfig {
  InterferometerConfig base;  ///< base.flux is ignored
  Vec2 patch_centre{};
  int patch_size = 9;         ///< plaquettes per side
  Flux patch_flux{};          ///< B times patch area
  double t_on = -1.0;         ///< negative: 0.25 T
  double t_off = -1.0;        ///< negative: 0.75 T

  UniformFieldPatch patch() const;
  bool enclosed() const;
};

FringeReport sourceless_field_scenario(const SourcelessConfig& cfg);

/// Free packet flying past the masked flux line at lateral offset +-offset.
struct FlybyConfig {
  int nx = 256;
  int ny = 256;
  double a = 1.0;
  double mass = 1.0;
  UnitSystem units{};
  Charge charge{};
  Flux flux{};
  double mask_radius = 8.0;
  double sigma = 10.0;
  double k0 = 1.0;
  double offset = 56.0;
  double start_y = -70.0;
  double duration = 168.0;
  double dt = 0.5;
  bool random_gauge = false;
  std::uint64_t seed = 0;
  int sample_every = 0;

  void validate() const;
  long steps() const;
  Lattice2D lattice() const;
};

struct VelocityPhaseReport {
  double expected = 0.0;
  double phase_left = 0.0;   ///< arg <psi_off | psi_on>, left pass
  double phase_right = 0.0;
  double phase_difference = 0.0;  ///< right - left, reduced
  Vec2 v_before_left{};
  Vec2 v_before_right{};
  Vec2 v_after_on_left{};
  Vec2 v_after_on_right{};
  Vec2 v_after_off_left{};
  Vec2 v_after_off_right{};
  double velocity_deviation = 0.0;  ///< max |v_on - v_off| / |v_off| after passage
  double mirror_asymmetry = 0.0;    ///< flux-off left vs mirrored right density
  double norm_drift = 0.0;
  long steps = 0;
  TimeSeries series;
  std::vector<NamedState> finals;  ///< flux-on packets after passage
};

/// Throws InvalidArgument if the course passes within 3 sigma of the wall disc.
VelocityPhaseReport flyby_scenario(const FlybyConfig& cfg);

/// Annulus around the flux line: smooth radial confinement
/// m w^2 (r - R)^2 / 2 with walls beyond |r - R| > half_width.
struct AnnulusConfig {
  int nx = 200;
  int ny = 200;
  double a = 0.5;
  double mass = 1.0;
  UnitSystem units{};
  Charge charge{};
  Flux flux{};
  double radius = 40.0;
  double radial_omega = 0.25;
  double half_width = 8.0;
  int levels = 5;
  bool random_gauge = false;
  std::uint64_t seed = 0;
  EigenOptions solver{};

  void validate() const;
  Lattice2D lattice() const;
};

struct AnnulusSpectrum {
  std::vector<double> energies;
  std::vector<double> residuals;
  int iterations = 0;
  std::size_t sites = 0;
};

AnnulusSpectrum annulus_spectrum(const AnnulusConfig& cfg);

struct ChargeScalingPoint {
  double lambda = 1.0;
  FringeReport fringe;
  double deflection = 0.0;  ///< shift of the right arm's final <y> caused by the contact repulsion
};

struct ChargeScalingReport {
  std::vector<ChargeScalingPoint> points;
  std::vector<double> deflection_ratios;  ///< deflection(lambda) / deflection(lambdas[0])
};

/// Runs the interferometer at q = lambda q0, Phi = Phi0_bar / lambda, with the
/// contact repulsion scaling as q^2. `base` holds q0, Phi0_bar and g.
ChargeScalingReport charge_scaling_scenario(const InterferometerConfig& base, std::span<const double> lambdas,
                                            int jobs = 1);

}  // namespace gaugelab::lattice
