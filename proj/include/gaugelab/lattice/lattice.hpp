#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "gaugelab/core/geometry.hpp"
#include "gaugelab/core/units.hpp"

namespace gaugelab::lattice {

using cplx = std::complex<double>;

/// Square lattice of nx * ny sites with spacing a. Site (i, j) sits at
/// origin + (i a, j a); storage is row-major with index j * nx + i.
struct Lattice2D {
  int nx = 256;
  int ny = 256;
  double a = 1.0;
  Vec2 origin{};

  /// Lattice whose geometric centre is the point (0, 0). For even nx, ny the
  /// centre is the middle of plaquette (nx/2 - 1, ny/2 - 1).
  static Lattice2D centered(int nx, int ny, double a);

  void validate() const;
  std::size_t size() const noexcept { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t index(int i, int j) const noexcept { return static_cast<std::size_t>(j) * nx + i; }
  double x(int i) const noexcept { return origin.x + i * a; }
  double y(int j) const noexcept { return origin.y + j * a; }
  Vec2 position(int i, int j) const noexcept { return {x(i), y(j)}; }
  /// Centre of plaquette (i, j), the cell whose lower-left corner is site (i, j).
  Vec2 plaquette_center(int i, int j) const noexcept { return {x(i) + 0.5 * a, y(j) + 0.5 * a}; }
  bool valid_plaquette(int i, int j) const noexcept { return i >= 0 && j >= 0 && i < nx - 1 && j < ny - 1; }

  friend bool operator==(const Lattice2D&, const Lattice2D&) = default;
};

struct Plaquette {
  int i = 0;
  int j = 0;
  friend bool operator==(const Plaquette&, const Plaquette&) = default;
};

/// Peierls phases on directed edges. x(i, j) is the unit-modulus factor
/// exp(i (q / hbar c) * integral of A.dl) picked up when hopping from site
/// (i, j) to (i + 1, j); y(i, j) likewise from (i, j) to (i, j + 1). The
/// reverse hop carries the complex conjugate.
class LinkField {
 public:
  explicit LinkField(const Lattice2D& lattice);

  const Lattice2D& lattice() const noexcept { return lattice_; }
  cplx& x(int i, int j) { return ux_[static_cast<std::size_t>(j) * (lattice_.nx - 1) + i]; }
  cplx x(int i, int j) const { return ux_[static_cast<std::size_t>(j) * (lattice_.nx - 1) + i]; }
  cplx& y(int i, int j) { return uy_[static_cast<std::size_t>(j) * lattice_.nx + i]; }
  cplx y(int i, int j) const { return uy_[static_cast<std::size_t>(j) * lattice_.nx + i]; }

  /// Phase factor acquired going counterclockwise around plaquette (i, j).
  cplx plaquette(int i, int j) const;
  /// arg of plaquette(i, j), in (-pi, pi].
  double plaquette_phase(int i, int j) const;
  /// Phase factor acquired along a closed loop of nearest-neighbour sites.
  cplx holonomy(std::span<const std::pair<int, int>> loop) const;

  const std::vector<cplx>& x_links() const noexcept { return ux_; }
  const std::vector<cplx>& y_links() const noexcept { return uy_; }

 private:
  Lattice2D lattice_;
  std::vector<cplx> ux_;
  std::vector<cplx> uy_;
};

/// Complex amplitude per site, normalised so that sum |psi|^2 a^2 = 1.
class Wavefunction2D {
 public:
  explicit Wavefunction2D(const Lattice2D& lattice);
  Wavefunction2D(const Lattice2D& lattice, std::vector<cplx> values);

  const Lattice2D& lattice() const noexcept { return lattice_; }
  cplx& operator()(int i, int j) { return psi_[lattice_.index(i, j)]; }
  cplx operator()(int i, int j) const { return psi_[lattice_.index(i, j)]; }
  std::vector<cplx>& values() noexcept { return psi_; }
  const std::vector<cplx>& values() const noexcept { return psi_; }

  double norm() const;
  void normalize();
  std::vector<double> density() const;

 private:
  Lattice2D lattice_;
  std::vector<cplx> psi_;
};

/// Static scalar potential and hard-wall mask (psi is held at zero on walls).
class PotentialGrid {
 public:
  explicit PotentialGrid(const Lattice2D& lattice);

  const Lattice2D& lattice() const noexcept { return lattice_; }
  double& v(int i, int j) { return v_[lattice_.index(i, j)]; }
  double v(int i, int j) const { return v_[lattice_.index(i, j)]; }
  bool wall(int i, int j) const { return wall_[lattice_.index(i, j)] != 0; }
  void set_wall(int i, int j, bool on = true) { wall_[lattice_.index(i, j)] = on ? 1 : 0; }
  const std::vector<double>& values() const noexcept { return v_; }
  const std::vector<std::uint8_t>& walls() const noexcept { return wall_; }

  /// Mask every site strictly inside the disc |r - centre| < radius.
  void add_disc_wall(Vec2 centre, double radius);
  /// Mask every site outside r_inner <= |r - centre| <= r_outer.
  void keep_annulus(Vec2 centre, double r_inner, double r_outer);
  /// Throws InvalidArgument if any unmasked site has a non-finite potential.
  void validate() const;

 private:
  Lattice2D lattice_;
  std::vector<double> v_;
  std::vector<std::uint8_t> wall_;
};

/// Thin solenoid threading one plaquette.
struct FluxLine {
  Plaquette at{};
  Flux flux{};
};

/// Uniform field B over plaquettes [i0, i1) x [j0, j1), switched on for t in [t_on, t_off).
struct UniformFieldPatch {
  int i0 = 0;
  int j0 = 0;
  int i1 = 1;
  int j1 = 1;
  double field = 0.0;
  double t_on = 0.0;
  double t_off = 1.0;

  void validate(const Lattice2D& lattice) const;
  double area(const Lattice2D& lattice) const { return double(i1 - i0) * (j1 - j0) * lattice.a * lattice.a; }
  bool active(double t) const noexcept { return t >= t_on && t < t_off; }
};

/// Links realising the given phase on each plaquette (row-major over
/// (nx - 1) x (ny - 1) plaquettes). String gauge: for each plaquette the
/// compensating phase sits on the y-links of a cut running from it along -x
/// to the lattice edge.
LinkField links_from_plaquette_phases(const Lattice2D& lattice, std::span<const double> phases);

/// Flux line in string gauge: y-links crossed by the cut from the flux
/// plaquette to the left edge carry exp(-2 pi i (q/e) Phi/Phi0). Every other
/// plaquette is field free.
LinkField build_flux_links(const Lattice2D& lattice, const FluxLine& line, Charge q, const UnitSystem& units);

/// Links for a uniform field patch (ignoring its time window).
LinkField build_patch_links(const Lattice2D& lattice, const UniformFieldPatch& patch, Charge q,
                            const UnitSystem& units);

/// Per-site gauge angle.
using GaugeFunction = std::vector<double>;

/// Uniform random chi in [0, 2 pi) per site.
GaugeFunction random_gauge(const Lattice2D& lattice, std::uint64_t seed);

/// psi -> e^{i chi} psi.
Wavefunction2D gauge_transform(const Wavefunction2D& psi, const GaugeFunction& chi);
/// U(s -> s') -> e^{i chi(s')} U e^{-i chi(s)}, which keeps the hopping
/// Hamiltonian covariant under psi -> e^{i chi} psi. Plaquettes are unchanged.
LinkField gauge_transform(const LinkField& links, const GaugeFunction& chi);

struct GaugeTransformed {
  LinkField links;
  Wavefunction2D psi;
};
GaugeTransformed gauge_transform(const LinkField& links, const Wavefunction2D& psi, const GaugeFunction& chi);

/// Gaussian packet exp(-|r - c|^2 / (4 sigma^2) + i k.r), normalised;
/// sigma is the position standard deviation of |psi|^2 per axis.
Wavefunction2D gaussian_packet(const Lattice2D& lattice, Vec2 centre, double sigma, Vec2 wavevector);

/// Zero the amplitude on walls.
void apply_walls(Wavefunction2D& psi, const PotentialGrid& potential);

/// sum conj(a) b a^2
cplx overlap(const Wavefunction2D& a, const Wavefunction2D& b);
Vec2 mean_position(const Wavefunction2D& psi);

/// Gauge-covariant velocity <v> = (hbar / m a) Im sum conj(psi_s) U*(s->s') psi_s'
/// over links, weighted by a^2. Hopping into walls carries no current.
Vec2 mean_velocity(const Wavefunction2D& psi, const LinkField& links, double mass, const UnitSystem& units);

/// Snapshot of |psi|^2: one JSON header line, then nx*ny little-endian
/// float64 values, row-major (x fastest).
void write_density_snapshot(std::ostream& os, const Wavefunction2D& psi, double t);

}  // namespace gaugelab::lattice
