#include "gaugelab/lattice/lattice.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <string>

#include "gaugelab/core/phase.hpp"

namespace gaugelab::lattice {

Lattice2D Lattice2D::centered(int nx, int ny, double a) {
  Lattice2D l{nx, ny, a, {-0.5 * (nx - 1) * a, -0.5 * (ny - 1) * a}};
  l.validate();
  return l;
}

void Lattice2D::validate() const {
  if (nx < 16 || ny < 16) throw InvalidArgument("Lattice2D: nx and ny must be >= 16");
  if (!(a > 0.0) || !std::isfinite(a)) throw InvalidArgument("Lattice2D: spacing must be finite and > 0");
}

LinkField::LinkField(const Lattice2D& lattice)
    : lattice_(lattice),
      ux_(static_cast<std::size_t>(lattice.nx - 1) * lattice.ny, cplx(1.0, 0.0)),
      uy_(static_cast<std::size_t>(lattice.nx) * (lattice.ny - 1), cplx(1.0, 0.0)) {
  lattice_.validate();
}

cplx LinkField::plaquette(int i, int j) const {
  return x(i, j) * y(i + 1, j) * std::conj(x(i, j + 1)) * std::conj(y(i, j));
}

double LinkField::plaquette_phase(int i, int j) const { return std::arg(plaquette(i, j)); }

cplx LinkField::holonomy(std::span<const std::pair<int, int>> loop) const {
  cplx acc(1.0, 0.0);
  for (std::size_t k = 0; k < loop.size(); ++k) {
    const auto [i0, j0] = loop[k];
    const auto [i1, j1] = loop[(k + 1) % loop.size()];
    if (i1 == i0 + 1 && j1 == j0) {
      acc *= x(i0, j0);
    } else if (i1 == i0 - 1 && j1 == j0) {
      acc *= std::conj(x(i1, j1));
    } else if (j1 == j0 + 1 && i1 == i0) {
      acc *= y(i0, j0);
    } else if (j1 == j0 - 1 && i1 == i0) {
      acc *= std::conj(y(i1, j1));
    } else {
      throw InvalidArgument("holonomy: loop step " + std::to_string(k) + " is not a nearest-neighbour hop");
    }
  }
  return acc;
}

Wavefunction2D::Wavefunction2D(const Lattice2D& lattice) : lattice_(lattice), psi_(lattice.size()) {
  lattice_.validate();
}

Wavefunction2D::Wavefunction2D(const Lattice2D& lattice, std::vector<cplx> values)
    : lattice_(lattice), psi_(std::move(values)) {
  lattice_.validate();
  if (psi_.size() != lattice_.size()) throw InvalidArgument("Wavefunction2D: value count does not match lattice");
}

double Wavefunction2D::norm() const {
  double s = 0.0;
  for (const auto& z : psi_) s += std::norm(z);
  return s * lattice_.a * lattice_.a;
}

void Wavefunction2D::normalize() {
  const double n = norm();
  if (!(n > 0.0)) throw InvalidArgument("Wavefunction2D: cannot normalise a zero state");
  const double s = 1.0 / std::sqrt(n);
  for (auto& z : psi_) z *= s;
}

std::vector<double> Wavefunction2D::density() const {
  std::vector<double> d(psi_.size());
  std::transform(psi_.begin(), psi_.end(), d.begin(), [](cplx z) { return std::norm(z); });
  return d;
}

PotentialGrid::PotentialGrid(const Lattice2D& lattice)
    : lattice_(lattice), v_(lattice.size(), 0.0), wall_(lattice.size(), 0) {
  lattice_.validate();
}

void PotentialGrid::add_disc_wall(Vec2 centre, double radius) {
  for (int j = 0; j < lattice_.ny; ++j) {
    for (int i = 0; i < lattice_.nx; ++i) {
      if (norm(lattice_.position(i, j) - centre) < radius) set_wall(i, j);
    }
  }
}

void PotentialGrid::keep_annulus(Vec2 centre, double r_inner, double r_outer) {
  for (int j = 0; j < lattice_.ny; ++j) {
    for (int i = 0; i < lattice_.nx; ++i) {
      const double r = norm(lattice_.position(i, j) - centre);
      if (r < r_inner || r > r_outer) set_wall(i, j);
    }
  }
}

void PotentialGrid::validate() const {
  for (std::size_t s = 0; s < v_.size(); ++s) {
    if (!wall_[s] && !std::isfinite(v_[s])) {
      throw InvalidArgument("PotentialGrid: non-finite potential at site " + std::to_string(s));
    }
  }
}

void UniformFieldPatch::validate(const Lattice2D& lattice) const {
  if (!(i0 < i1 && j0 < j1) || !lattice.valid_plaquette(i0, j0) || !lattice.valid_plaquette(i1 - 1, j1 - 1)) {
    throw InvalidArgument("UniformFieldPatch: plaquette range lies outside the lattice or is empty");
  }
  if (!(t_on < t_off)) throw InvalidArgument("UniformFieldPatch: need t_on < t_off");
  if (!std::isfinite(field)) throw InvalidArgument("UniformFieldPatch: field must be finite");
}

LinkField links_from_plaquette_phases(const Lattice2D& lattice, std::span<const double> phases) {
  const int px = lattice.nx - 1;
  const int py = lattice.ny - 1;
  if (phases.size() != static_cast<std::size_t>(px) * py) {
    throw InvalidArgument("links_from_plaquette_phases: expected one phase per plaquette");
  }
  LinkField links(lattice);
  // y-link (i, j) is crossed by the cut of every plaquette (i', j) with i' >= i.
  // The counterclockwise loop of plaquette (i, j) runs down its left edge, so
  // the link carries minus the summed phase of the plaquettes to its right.
  for (int j = 0; j < py; ++j) {
    double acc = 0.0;
    for (int i = px - 1; i >= 0; --i) {
      acc += phases[static_cast<std::size_t>(j) * px + i];
      if (acc != 0.0) links.y(i, j) = std::polar(1.0, -acc);
    }
  }
  return links;
}

LinkField build_flux_links(const Lattice2D& lattice, const FluxLine& line, Charge q, const UnitSystem& units) {
  lattice.validate();
  if (!lattice.valid_plaquette(line.at.i, line.at.j)) {
    throw InvalidArgument("build_flux_links: plaquette (" + std::to_string(line.at.i) + ", " +
                          std::to_string(line.at.j) + ") is outside the lattice");
  }
  const double phase = core::ab_phase(q, line.flux, units);
  LinkField links(lattice);
  if (phase == 0.0) return links;
  const cplx u = std::polar(1.0, -phase);
  for (int i = 0; i <= line.at.i; ++i) links.y(i, line.at.j) = u;
  return links;
}

LinkField build_patch_links(const Lattice2D& lattice, const UniformFieldPatch& patch, Charge q,
                            const UnitSystem& units) {
  patch.validate(lattice);
  const int px = lattice.nx - 1;
  const double per_plaquette = core::ab_phase(q, Flux(patch.field * lattice.a * lattice.a), units);
  std::vector<double> phases(static_cast<std::size_t>(px) * (lattice.ny - 1), 0.0);
  for (int j = patch.j0; j < patch.j1; ++j) {
    for (int i = patch.i0; i < patch.i1; ++i) phases[static_cast<std::size_t>(j) * px + i] = per_plaquette;
  }
  return links_from_plaquette_phases(lattice, phases);
}

GaugeFunction random_gauge(const Lattice2D& lattice, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(0.0, kTwoPi);
  GaugeFunction chi(lattice.size());
  for (auto& c : chi) c = angle(rng);
  return chi;
}

Wavefunction2D gauge_transform(const Wavefunction2D& psi, const GaugeFunction& chi) {
  if (chi.size() != psi.lattice().size()) throw InvalidArgument("gauge_transform: chi size does not match lattice");
  Wavefunction2D out = psi;
  for (std::size_t s = 0; s < chi.size(); ++s) out.values()[s] *= std::polar(1.0, chi[s]);
  return out;
}

LinkField gauge_transform(const LinkField& links, const GaugeFunction& chi) {
  const Lattice2D& l = links.lattice();
  if (chi.size() != l.size()) throw InvalidArgument("gauge_transform: chi size does not match lattice");
  LinkField out = links;
  for (int j = 0; j < l.ny; ++j) {
    for (int i = 0; i < l.nx; ++i) {
      const double here = chi[l.index(i, j)];
      if (i + 1 < l.nx) out.x(i, j) *= std::polar(1.0, chi[l.index(i + 1, j)] - here);
      if (j + 1 < l.ny) out.y(i, j) *= std::polar(1.0, chi[l.index(i, j + 1)] - here);
    }
  }
  return out;
}

GaugeTransformed gauge_transform(const LinkField& links, const Wavefunction2D& psi, const GaugeFunction& chi) {
  return {gauge_transform(links, chi), gauge_transform(psi, chi)};
}

Wavefunction2D gaussian_packet(const Lattice2D& lattice, Vec2 centre, double sigma, Vec2 wavevector) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian_packet: sigma must be > 0");
  Wavefunction2D psi(lattice);
  for (int j = 0; j < lattice.ny; ++j) {
    for (int i = 0; i < lattice.nx; ++i) {
      const Vec2 d = lattice.position(i, j) - centre;
      const double env = std::exp(-dot(d, d) / (4.0 * sigma * sigma));
      psi(i, j) = env * std::polar(1.0, dot(wavevector, lattice.position(i, j) - centre));
    }
  }
  psi.normalize();
  return psi;
}

void apply_walls(Wavefunction2D& psi, const PotentialGrid& potential) {
  if (!(psi.lattice() == potential.lattice())) throw InvalidArgument("apply_walls: lattice mismatch");
  const auto& w = potential.walls();
  for (std::size_t s = 0; s < w.size(); ++s) {
    if (w[s]) psi.values()[s] = 0.0;
  }
}

cplx overlap(const Wavefunction2D& a, const Wavefunction2D& b) {
  if (!(a.lattice() == b.lattice())) throw InvalidArgument("overlap: lattice mismatch");
  cplx s{};
  const auto& x = a.values();
  const auto& y = b.values();
  for (std::size_t k = 0; k < x.size(); ++k) s += std::conj(x[k]) * y[k];
  return s * (a.lattice().a * a.lattice().a);
}

Vec2 mean_position(const Wavefunction2D& psi) {
  const Lattice2D& l = psi.lattice();
  double sx = 0.0, sy = 0.0, sn = 0.0;
  for (int j = 0; j < l.ny; ++j) {
    for (int i = 0; i < l.nx; ++i) {
      const double p = std::norm(psi(i, j));
      sx += p * l.x(i);
      sy += p * l.y(j);
      sn += p;
    }
  }
  return {sx / sn, sy / sn};
}

Vec2 mean_velocity(const Wavefunction2D& psi, const LinkField& links, double mass, const UnitSystem& units) {
  const Lattice2D& l = psi.lattice();
  if (!(links.lattice() == l)) throw InvalidArgument("mean_velocity: lattice mismatch");
  double vx = 0.0, vy = 0.0;
  for (int j = 0; j < l.ny; ++j) {
    for (int i = 0; i < l.nx; ++i) {
      const cplx here = std::conj(psi(i, j));
      if (i + 1 < l.nx) vx += std::imag(here * std::conj(links.x(i, j)) * psi(i + 1, j));
      if (j + 1 < l.ny) vy += std::imag(here * std::conj(links.y(i, j)) * psi(i, j + 1));
    }
  }
  const double scale = units.hbar() / (mass * l.a) * l.a * l.a;
  return {vx * scale, vy * scale};
}

void write_density_snapshot(std::ostream& os, const Wavefunction2D& psi, double t) {
  static_assert(std::endian::native == std::endian::little, "snapshot writer assumes a little-endian host");
  const Lattice2D& l = psi.lattice();
  nlohmann::json header{{"format", "gaugelab-density"}, {"version", 1}, {"nx", l.nx}, {"ny", l.ny},
                        {"a", l.a},  {"origin", {l.origin.x, l.origin.y}}, {"t", t},
                        {"encoding", "float64-le"}, {"order", "row-major, x fastest"}};
  os << header.dump() << '\n';
  const auto d = psi.density();
  os.write(reinterpret_cast<const char*>(d.data()), static_cast<std::streamsize>(d.size() * sizeof(double)));
}

}  // namespace gaugelab::lattice
