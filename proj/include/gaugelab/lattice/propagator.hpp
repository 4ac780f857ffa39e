#pragma once

#include <vector>

#include "gaugelab/lattice/lattice.hpp"

namespace gaugelab::lattice {

/// Largest accepted time step, m a^2 / hbar: twice the explicit-scheme limit
/// m a^2 / 2 hbar. Crank-Nicolson is stable for any dt; the bound caps the
/// phase error at the top of the lattice band (8t, t = hbar^2 / 2 m a^2).
double max_time_step(double mass, double a, const UnitSystem& units);

/// Throws StepBoundError quoting the bound if dt is not in (0, max_time_step].
void check_time_step(double dt, double mass, double a, const UnitSystem& units);

/// Isotropic harmonic trap V = m Omega^2 |r - centre|^2 / 2, added on top of
/// the static potential. Separable, so its kick costs nx + ny exponentials.
struct HarmonicTrap {
  Vec2 centre{};
  double omega = 0.0;
};

/// Gauge-covariant lattice Hamiltonian
///   H = sum_s (4t + V_s) |s><s| - t sum_links (U |s'><s| + h.c.),  t = hbar^2 / (2 m a^2),
/// propagated by alternating Lie splitting of Crank-Nicolson sweeps:
///   even steps  K/2 . X . Y . K/2,   odd steps  K/2 . Y . X . K/2,
/// where X, Y are Cayley factors (1 + i dt H_axis / 2hbar)^-1 (1 - i dt H_axis / 2hbar)
/// and K/2 = exp(-i V dt / 2hbar). Every factor is exactly unitary, and pairs
/// of steps form a symmetric (second-order) composition. Wall sites are cut
/// out of the hopping graph and held at zero.
class Propagator {
 public:
  Propagator(const PotentialGrid& potential, double mass, const UnitSystem& units, double dt);

  /// Refactor the tridiagonal sweeps for new links. Cheap; O(nx ny).
  void set_links(const LinkField& links);
  bool has_links() const noexcept { return links_set_; }

  /// One step from t to t + dt. `trap_begin` / `trap_end` are the optional
  /// trap positions used for the opening and closing half kicks.
  void step(Wavefunction2D& psi, const HarmonicTrap* trap_begin = nullptr, const HarmonicTrap* trap_end = nullptr);
  void evolve(Wavefunction2D& psi, long steps);

  double dt() const noexcept { return dt_; }
  double hopping() const noexcept { return hop_; }
  const Lattice2D& lattice() const noexcept { return lattice_; }

 private:
  // Tridiagonal (1 + i tau H_axis), tau = dt / 2hbar, stored per site with
  // the Thomas forward elimination already done. Index is the site index in
  // both directions; "lower" couples to the previous site along the axis.
  struct Sweep {
    std::vector<cplx> diag;
    std::vector<cplx> lower;
    std::vector<cplx> upper;
    std::vector<cplx> cprime;
    std::vector<cplx> inv_pivot;
  };

  void factor(Sweep& s, bool along_x, const LinkField& links);
  void sweep_x(Wavefunction2D& psi);
  void sweep_y(Wavefunction2D& psi);
  void kick(Wavefunction2D& psi, const HarmonicTrap* trap);

  Lattice2D lattice_;
  std::vector<std::uint8_t> wall_;
  double mass_;
  UnitSystem units_;
  double dt_;
  double hop_;
  std::vector<cplx> static_kick_;
  bool links_set_ = false;
  Sweep sx_;
  Sweep sy_;
  long parity_ = 0;
  std::vector<cplx> scratch_;
};

/// Evolve `steps` steps of size dt under static links and potential.
Wavefunction2D evolve(const Wavefunction2D& psi, const LinkField& links, const PotentialGrid& potential, double dt,
                      long steps, double mass = 1.0, const UnitSystem& units = {});

}  // namespace gaugelab::lattice
