#include "gaugelab/lattice/propagator.hpp"

#include <cmath>
#include <sstream>

namespace gaugelab::lattice {

double max_time_step(double mass, double a, const UnitSystem& units) { return mass * a * a / units.hbar(); }

void check_time_step(double dt, double mass, double a, const UnitSystem& units) {
  const double bound = max_time_step(mass, a, units);
  if (!(dt > 0.0) || !(dt <= bound)) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "time step dt = " << dt << " violates the stability guard 0 < dt <= m a^2 / hbar = " << bound;
    throw StepBoundError(msg.str(), bound);
  }
}

Propagator::Propagator(const PotentialGrid& potential, double mass, const UnitSystem& units, double dt)
    : lattice_(potential.lattice()), wall_(potential.walls()), mass_(mass), units_(units), dt_(dt) {
  if (!(mass > 0.0)) throw InvalidArgument("Propagator: mass must be > 0");
  potential.validate();
  check_time_step(dt, mass, lattice_.a, units);
  hop_ = units.hbar() * units.hbar() / (2.0 * mass * lattice_.a * lattice_.a);
  static_kick_.resize(lattice_.size());
  const double half = 0.5 * dt / units.hbar();
  for (std::size_t s = 0; s < static_kick_.size(); ++s) {
    static_kick_[s] = wall_[s] ? cplx{} : std::polar(1.0, -potential.values()[s] * half);
  }
  scratch_.resize(lattice_.size());
}

void Propagator::factor(Sweep& sw, bool along_x, const LinkField& links) {
  const int nx = lattice_.nx;
  const int ny = lattice_.ny;
  const std::size_t n = lattice_.size();
  const cplx itau(0.0, 0.5 * dt_ / units_.hbar());
  sw.diag.assign(n, cplx(1.0, 0.0));
  sw.lower.assign(n, cplx{});
  sw.upper.assign(n, cplx{});
  sw.cprime.assign(n, cplx{});
  sw.inv_pivot.assign(n, cplx{});

  const std::size_t stride = along_x ? 1 : static_cast<std::size_t>(nx);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const std::size_t s = lattice_.index(i, j);
      if (wall_[s]) continue;
      sw.diag[s] = 1.0 + itau * (2.0 * hop_);
      const bool has_next = along_x ? i + 1 < nx : j + 1 < ny;
      if (!has_next || wall_[s + stride]) continue;
      // H_{next, s} = -t U(s -> next); H_{s, next} is its conjugate.
      const cplx u = along_x ? links.x(i, j) : links.y(i, j);
      sw.lower[s + stride] = itau * (-hop_ * u);
      sw.upper[s] = itau * (-hop_ * std::conj(u));
    }
  }

  // Thomas elimination, run along every line at once.
  for (std::size_t s = 0; s < n; ++s) {
    const bool first = along_x ? (s % nx == 0) : (s < stride);
    const cplx m = first ? sw.diag[s] : sw.diag[s] - sw.lower[s] * sw.cprime[s - stride];
    sw.inv_pivot[s] = 1.0 / m;
    sw.cprime[s] = sw.upper[s] * sw.inv_pivot[s];
  }
}

void Propagator::set_links(const LinkField& links) {
  if (!(links.lattice() == lattice_)) throw InvalidArgument("Propagator: links live on a different lattice");
  factor(sx_, true, links);
  factor(sy_, false, links);
  links_set_ = true;
}

void Propagator::sweep_x(Wavefunction2D& psi) {
  const int nx = lattice_.nx;
  const int ny = lattice_.ny;
  auto& v = psi.values();
  auto& y = scratch_;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t s = row + i;
      cplx b = (2.0 - sx_.diag[s]) * v[s];
      if (i > 0) b -= sx_.lower[s] * v[s - 1];
      if (i + 1 < nx) b -= sx_.upper[s] * v[s + 1];
      if (wall_[s]) b = 0.0;
      y[s] = (i > 0 ? b - sx_.lower[s] * y[s - 1] : b) * sx_.inv_pivot[s];
    }
    v[row + nx - 1] = y[row + nx - 1];
    for (int i = nx - 2; i >= 0; --i) v[row + i] = y[row + i] - sx_.cprime[row + i] * v[row + i + 1];
  }
}

void Propagator::sweep_y(Wavefunction2D& psi) {
  const int nx = lattice_.nx;
  const int ny = lattice_.ny;
  auto& v = psi.values();
  auto& y = scratch_;
  for (int j = 0; j < ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t s = row + i;
      cplx b = (2.0 - sy_.diag[s]) * v[s];
      if (j > 0) b -= sy_.lower[s] * v[s - nx];
      if (j + 1 < ny) b -= sy_.upper[s] * v[s + nx];
      if (wall_[s]) b = 0.0;
      y[s] = (j > 0 ? b - sy_.lower[s] * y[s - nx] : b) * sy_.inv_pivot[s];
    }
  }
  // The forward pass wrote only to scratch, so every right-hand side above saw
  // the incoming state. Back-substitute in place.
  for (int j = ny - 1; j >= 0; --j) {
    const std::size_t row = static_cast<std::size_t>(j) * nx;
    for (int i = 0; i < nx; ++i) {
      const std::size_t s = row + i;
      v[s] = j + 1 < ny ? y[s] - sy_.cprime[s] * v[s + nx] : y[s];
    }
  }
}

void Propagator::kick(Wavefunction2D& psi, const HarmonicTrap* trap) {
  auto& v = psi.values();
  if (!trap || trap->omega == 0.0) {
    for (std::size_t s = 0; s < v.size(); ++s) v[s] *= static_kick_[s];
    return;
  }
  const double k = 0.5 * mass_ * trap->omega * trap->omega * 0.5 * dt_ / units_.hbar();
  std::vector<cplx> ex(lattice_.nx), ey(lattice_.ny);
  for (int i = 0; i < lattice_.nx; ++i) {
    const double d = lattice_.x(i) - trap->centre.x;
    ex[i] = std::polar(1.0, -k * d * d);
  }
  for (int j = 0; j < lattice_.ny; ++j) {
    const double d = lattice_.y(j) - trap->centre.y;
    ey[j] = std::polar(1.0, -k * d * d);
  }
  for (int j = 0; j < lattice_.ny; ++j) {
    const std::size_t row = static_cast<std::size_t>(j) * lattice_.nx;
    for (int i = 0; i < lattice_.nx; ++i) v[row + i] *= static_kick_[row + i] * (ex[i] * ey[j]);
  }
}

void Propagator::step(Wavefunction2D& psi, const HarmonicTrap* trap_begin, const HarmonicTrap* trap_end) {
  if (!links_set_) throw InvalidArgument("Propagator: set_links must be called before stepping");
  if (!(psi.lattice() == lattice_)) throw InvalidArgument("Propagator: wavefunction lives on a different lattice");
  kick(psi, trap_begin);
  if (parity_ % 2 == 0) {
    sweep_x(psi);
    sweep_y(psi);
  } else {
    sweep_y(psi);
    sweep_x(psi);
  }
  kick(psi, trap_end);
  ++parity_;
}

void Propagator::evolve(Wavefunction2D& psi, long steps) {
  if (steps < 0) throw InvalidArgument("Propagator: negative step count");
  for (long k = 0; k < steps; ++k) step(psi);
}

Wavefunction2D evolve(const Wavefunction2D& psi, const LinkField& links, const PotentialGrid& potential, double dt,
                      long steps, double mass, const UnitSystem& units) {
  Propagator p(potential, mass, units, dt);
  p.set_links(links);
  Wavefunction2D out = psi;
  apply_walls(out, potential);
  p.evolve(out, steps);
  return out;
}

}  // namespace gaugelab::lattice
