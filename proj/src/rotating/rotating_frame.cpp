#include "gaugelab/rotating/rotating_frame.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <unsupported/Eigen/FFT>

namespace gaugelab::rotating {

PolarGrid::PolarGrid(double r_inner, double r_outer, int radial_points, int angular_points)
    : r_inner_(r_inner), r_outer_(r_outer), m_r_(radial_points), m_theta_(angular_points) {
  if (!(r_inner >= 0.0) || !(r_outer > r_inner) || !std::isfinite(r_outer)) {
    throw InvalidArgument("PolarGrid: need 0 <= r_inner < r_outer");
  }
  if (radial_points < 2) throw InvalidArgument("PolarGrid: need at least 2 radial points");
  if (angular_points < 8 || angular_points % 2 != 0) {
    throw InvalidArgument("PolarGrid: angular point count must be even and >= 8");
  }
}

double OperatorMatrix::hermiticity_defect() const {
  const SparseOperator adj = matrix.adjoint();
  const SparseOperator diff = matrix - adj;
  double worst = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
  }
  return worst;
}

namespace {

// Dense ring operators in units of hbar: first derivative D1 (L_z = -i hbar D1)
// and the matrix of L_z^2 / hbar^2. The Nyquist mode is dropped from both.
Eigen::MatrixXd ring_derivative(int m) {
  Eigen::MatrixXd d(m, m);
  const double dth = kTwoPi / m;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      double s = 0.0;
      for (int k = 1; k < m / 2; ++k) s += k * std::sin(k * (j - l) * dth);
      d(j, l) = -2.0 * s / m;
    }
  }
  return d;
}

Eigen::MatrixXd ring_lz_squared(int m) {
  Eigen::MatrixXd d(m, m);
  const double dth = kTwoPi / m;
  for (int j = 0; j < m; ++j) {
    for (int l = 0; l < m; ++l) {
      double s = 0.0;
      for (int k = 1; k < m / 2; ++k) s += double(k) * k * std::cos(k * (j - l) * dth);
      d(j, l) = 2.0 * s / m;
    }
  }
  return d;
}

// Tridiagonal -(1/r) d/dr (r d/dr) in the weighted basis, per unit hbar^2/2m.
struct RadialStencil {
  Eigen::VectorXd diag;
  Eigen::VectorXd off;  // couples i and i+1
};

RadialStencil radial_stencil(const PolarGrid& g) {
  const int m = g.radial_points();
  const double h = g.dr();
  auto face = [&](int i) { return g.r_inner() + i * h; };
  RadialStencil s{Eigen::VectorXd(m), Eigen::VectorXd(m - 1)};
  for (int i = 0; i < m; ++i) {
    const double ri = g.r(i);
    double inner = face(i);
    double outer = face(i + 1);
    if (i == 0) inner *= 2.0;  // Dirichlet ghost; vanishes when r_inner == 0
    if (i == m - 1) outer *= 2.0;
    s.diag(i) = (inner + outer) / (ri * h * h);
    if (i + 1 < m) s.off(i) = -face(i + 1) / (h * h * std::sqrt(ri * g.r(i + 1)));
  }
  return s;
}

std::vector<double> sample_potential(const PolarGrid& g, const RadialPotential& v) {
  std::vector<double> out(g.radial_points());
  for (int i = 0; i < g.radial_points(); ++i) {
    out[i] = v ? v(g.r(i)) : 0.0;
    if (!std::isfinite(out[i])) {
      throw InvalidArgument("potential is not finite at r = " + std::to_string(g.r(i)));
    }
  }
  return out;
}

SparseOperator radial_kinetic(const PolarGrid& g, const Particle& p) {
  const double c = p.units.hbar() * p.units.hbar() / (2.0 * p.mass);
  const auto st = radial_stencil(g);
  const int mt = g.angular_points();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(g.size()) * 3);
  for (int i = 0; i < g.radial_points(); ++i) {
    for (int j = 0; j < mt; ++j) {
      t.emplace_back(g.index(i, j), g.index(i, j), c * st.diag(i));
      if (i + 1 < g.radial_points()) {
        t.emplace_back(g.index(i, j), g.index(i + 1, j), c * st.off(i));
        t.emplace_back(g.index(i + 1, j), g.index(i, j), c * st.off(i));
      }
    }
  }
  SparseOperator m(g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

// Apply a dense ring operator to every ring of a state.
StateVector apply_ring(const PolarGrid& g, const Eigen::MatrixXcd& op, const StateVector& psi) {
  const int mt = g.angular_points();
  StateVector out(psi.size());
  for (int i = 0; i < g.radial_points(); ++i) out.segment(i * mt, mt) = op * psi.segment(i * mt, mt);
  return out;
}

StateVector apply_radial_profile(const PolarGrid& g, const StateVector& psi, const std::function<double(int)>& f) {
  StateVector out(psi.size());
  const int mt = g.angular_points();
  for (int i = 0; i < g.radial_points(); ++i) out.segment(i * mt, mt) = f(i) * psi.segment(i * mt, mt);
  return out;
}

StateVector apply_site_function(const PolarGrid& g, const StateVector& psi, const std::function<double(int, int)>& f) {
  StateVector out(psi.size());
  for (int i = 0; i < g.radial_points(); ++i) {
    for (int j = 0; j < g.angular_points(); ++j) out(g.index(i, j)) = f(i, j) * psi(g.index(i, j));
  }
  return out;
}

// Centred d/dr of the unweighted field, returned in the weighted basis.
// Ghost values are taken as zero; callers use states that vanish at the walls.
StateVector apply_radial_derivative(const PolarGrid& g, const StateVector& psi) {
  const int mr = g.radial_points();
  const int mt = g.angular_points();
  const double h = g.dr();
  StateVector out(psi.size());
  for (int i = 0; i < mr; ++i) {
    const double wi = std::sqrt(g.r(i));
    for (int j = 0; j < mt; ++j) {
      const cplx up = i + 1 < mr ? psi(g.index(i + 1, j)) / std::sqrt(g.r(i + 1)) : cplx{};
      const cplx dn = i > 0 ? psi(g.index(i - 1, j)) / std::sqrt(g.r(i - 1)) : cplx{};
      out(g.index(i, j)) = wi * (up - dn) / (2.0 * h);
    }
  }
  return out;
}

}  // namespace

OperatorMatrix build_hamiltonian(const PolarGrid& grid, const Particle& particle, const RadialPotential& potential) {
  if (!(particle.mass > 0.0)) throw InvalidArgument("build_hamiltonian: mass must be > 0");
  const auto v = sample_potential(grid, potential);
  const double hb = particle.units.hbar();
  const double c = hb * hb / (2.0 * particle.mass);
  const auto st = radial_stencil(grid);
  const Eigen::MatrixXd l2 = ring_lz_squared(grid.angular_points());
  const int mt = grid.angular_points();

  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(grid.size()) * (mt + 3));
  for (int i = 0; i < grid.radial_points(); ++i) {
    const double ang = c / (grid.r(i) * grid.r(i));
    for (int j = 0; j < mt; ++j) {
      const int s = grid.index(i, j);
      t.emplace_back(s, s, c * st.diag(i) + v[i]);
      if (i + 1 < grid.radial_points()) {
        t.emplace_back(s, grid.index(i + 1, j), c * st.off(i));
        t.emplace_back(grid.index(i + 1, j), s, c * st.off(i));
      }
      for (int l = 0; l < mt; ++l) t.emplace_back(s, grid.index(i, l), ang * l2(j, l));
    }
  }
  SparseOperator m(grid.size(), grid.size());
  m.setFromTriplets(t.begin(), t.end());
  return {grid, std::move(m)};
}

OperatorMatrix build_angular_momentum(const PolarGrid& grid, const UnitSystem& units) {
  const Eigen::MatrixXd d1 = ring_derivative(grid.angular_points());
  const int mt = grid.angular_points();
  std::vector<Eigen::Triplet<cplx>> t;
  t.reserve(static_cast<std::size_t>(grid.size()) * mt);
  for (int i = 0; i < grid.radial_points(); ++i) {
    for (int j = 0; j < mt; ++j) {
      for (int l = 0; l < mt; ++l) {
        if (d1(j, l) != 0.0) t.emplace_back(grid.index(i, j), grid.index(i, l), cplx(0.0, -units.hbar() * d1(j, l)));
      }
    }
  }
  SparseOperator m(grid.size(), grid.size());
  m.setFromTriplets(t.begin(), t.end());
  return {grid, std::move(m)};
}

double commutator_residual(const OperatorMatrix& a, const OperatorMatrix& b, const std::vector<StateVector>& states) {
  if (!(a.grid == b.grid)) throw InvalidArgument("commutator_residual: operators live on different grids");
  double worst = 0.0;
  for (const auto& psi : states) {
    const StateVector c = a.matrix * (b.matrix * psi) - b.matrix * (a.matrix * psi);
    worst = std::max(worst, c.norm());
  }
  return worst;
}

namespace {

std::vector<StateVector> random_states(int size, int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<StateVector> out;
  for (int k = 0; k < count; ++k) {
    StateVector v(size);
    for (int s = 0; s < size; ++s) v(s) = cplx(gauss(rng), gauss(rng));
    v.normalize();
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

FrameTransformResult transform_hamiltonian(const OperatorMatrix& h, const OperatorMatrix& lz, double omega,
                                           std::uint64_t probe_seed) {
  if (!(h.grid == lz.grid)) throw InvalidArgument("transform_hamiltonian: H and L_z are on different grids");
  if (!std::isfinite(omega)) throw InvalidArgument("transform_hamiltonian: omega must be finite");
  const double residual = commutator_residual(h, lz, random_states(h.grid.size(), 20, probe_seed));
  SparseOperator hp = h.matrix;
  if (omega != 0.0) hp = h.matrix - cplx(omega, 0.0) * lz.matrix;
  return {{h.grid, std::move(hp)}, residual};
}

double expanded_form_residual(const OperatorMatrix& h, const OperatorMatrix& lz, double omega, const Particle& particle,
                              const RadialPotential& potential, const std::vector<StateVector>& trial_states,
                              ExpansionRoute route) {
  if (!(h.grid == lz.grid)) throw InvalidArgument("expanded_form_residual: H and L_z are on different grids");
  const PolarGrid& g = h.grid;
  const double m = particle.mass;
  const double hb = particle.units.hbar();
  const auto v = sample_potential(g, potential);

  const SparseOperator kr = radial_kinetic(g, particle);
  const Eigen::MatrixXcd d1 = ring_derivative(g.angular_points()).cast<cplx>();

  double worst = 0.0;
  for (const auto& psi : trial_states) {
    if (std::abs(psi.squaredNorm() - 1.0) > 1e-10) throw InvalidArgument("expanded_form_residual: trial state not normalized");
    const StateVector reference = h.matrix * psi - omega * (lz.matrix * psi);
    StateVector expanded;
    if (route == ExpansionRoute::polar) {
      // pi^2 = pi_r^2 + pi_theta^2 with r pi_theta = L_z - m omega r^2.
      auto lambda = [&](const StateVector& x) -> StateVector {
        return lz.matrix * x - apply_radial_profile(g, x, [&](int i) { return m * omega * g.r(i) * g.r(i); });
      };
      const StateVector inner = apply_radial_profile(g, lambda(psi), [&](int i) { return 1.0 / (g.r(i) * g.r(i)); });
      expanded = kr * psi + lambda(inner) / (2.0 * m) +
                 apply_radial_profile(g, psi, [&](int i) { return v[i] - 0.5 * m * omega * omega * g.r(i) * g.r(i); });
    } else {
      // (p_x + m w y)^2 + (p_y - m w x)^2 = p^2 + m w (p_x y + y p_x - p_y x - x p_y) + m^2 w^2 r^2
      const cplx minus_i_hbar(0.0, -hb);
      auto px = [&](const StateVector& x) -> StateVector {
        const StateVector dr = apply_radial_derivative(g, x);
        const StateVector dth = apply_ring(g, d1, x);
        return minus_i_hbar * (apply_site_function(g, dr, [&](int, int j) { return std::cos(g.theta(j)); }) -
                               apply_site_function(g, dth, [&](int i, int j) { return std::sin(g.theta(j)) / g.r(i); }));
      };
      auto py = [&](const StateVector& x) -> StateVector {
        const StateVector dr = apply_radial_derivative(g, x);
        const StateVector dth = apply_ring(g, d1, x);
        return minus_i_hbar * (apply_site_function(g, dr, [&](int, int j) { return std::sin(g.theta(j)); }) +
                               apply_site_function(g, dth, [&](int i, int j) { return std::cos(g.theta(j)) / g.r(i); }));
      };
      auto xs = [&](int i, int j) { return g.r(i) * std::cos(g.theta(j)); };
      auto ys = [&](int i, int j) { return g.r(i) * std::sin(g.theta(j)); };
      const StateVector ypsi = apply_site_function(g, psi, ys);
      const StateVector xpsi = apply_site_function(g, psi, xs);
      const StateVector cross_terms = px(ypsi) + apply_site_function(g, px(psi), ys) - py(xpsi) -
                                      apply_site_function(g, py(psi), xs);
      expanded = h.matrix * psi + (omega / 2.0) * cross_terms;
    }
    const double scale = reference.norm();
    const double diff = (expanded - reference).norm();
    worst = std::max(worst, scale > 0.0 ? diff / scale : diff);
  }
  return worst;
}

StateVector transform_state(const PolarGrid& grid, const StateVector& state, double omega, double t) {
  if (state.size() != grid.size()) throw InvalidArgument("transform_state: state size does not match grid");
  const int mt = grid.angular_points();
  Eigen::FFT<double> fft;
  std::vector<cplx> ring(mt), modes(mt), back(mt);
  StateVector out(state.size());
  const double angle = omega * t;
  for (int i = 0; i < grid.radial_points(); ++i) {
    for (int j = 0; j < mt; ++j) ring[j] = state(grid.index(i, j));
    fft.fwd(modes, ring);
    for (int k = 0; k < mt; ++k) {
      const int n = k < mt / 2 ? k : (k == mt / 2 ? 0 : k - mt);
      // FFT uses exp(-i k theta) forward, so mode n multiplies exp(+i n theta).
      modes[k] *= std::polar(1.0, n * angle);
    }
    fft.inv(back, modes);
    for (int j = 0; j < mt; ++j) out(grid.index(i, j)) = back[j];
  }
  return out;
}

std::vector<StateVector> trial_states(const PolarGrid& grid, int count, std::uint64_t seed, int max_harmonic) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lo = grid.r_inner();
  const double hi = grid.r_outer();
  const int kmax = std::min(max_harmonic, grid.max_mode());
  std::vector<StateVector> out;
  for (int c = 0; c < count; ++c) {
    const double centre = lo + (0.35 + 0.3 * unit(rng)) * (hi - lo);
    const double width = (0.06 + 0.04 * unit(rng)) * (hi - lo);
    std::vector<cplx> coeff(2 * kmax + 1);
    for (auto& a : coeff) a = cplx(gauss(rng), gauss(rng));
    StateVector v(grid.size());
    for (int i = 0; i < grid.radial_points(); ++i) {
      const double x = (grid.r(i) - centre) / width;
      const double env = std::exp(-0.5 * x * x) * std::sqrt(grid.r(i));
      for (int j = 0; j < grid.angular_points(); ++j) {
        cplx s{};
        for (int k = -kmax; k <= kmax; ++k) s += coeff[k + kmax] * std::polar(1.0, k * grid.theta(j));
        v(grid.index(i, j)) = env * s;
      }
    }
    v.normalize();
    out.push_back(std::move(v));
  }
  return out;
}

namespace {

struct Block {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

Block radial_block(const PolarGrid& g, const Particle& p, const std::vector<double>& v, int n, double shift,
                   bool vectors) {
  const double hb = p.units.hbar();
  const double c = hb * hb / (2.0 * p.mass);
  const auto st = radial_stencil(g);
  Eigen::VectorXd diag(g.radial_points());
  for (int i = 0; i < g.radial_points(); ++i) {
    diag(i) = c * st.diag(i) + c * double(n) * n / (g.r(i) * g.r(i)) + v[i] + shift;
  }
  const Eigen::VectorXd off = c * st.off;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, off, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ConvergenceError("radial block eigensolver failed for n = " + std::to_string(n));
  return {es.eigenvalues(), vectors ? es.eigenvectors() : Eigen::MatrixXd{}};
}

}  // namespace

std::vector<JointEigenstate> joint_eigenstates(const PolarGrid& grid, const Particle& particle,
                                               const RadialPotential& potential, int count) {
  const auto v = sample_potential(grid, potential);
  struct Candidate {
    double e;
    int n;
    int k;
  };
  std::vector<Candidate> cand;
  std::vector<Block> blocks;
  const int nmax = grid.max_mode();
  for (int n = -nmax; n <= nmax; ++n) {
    blocks.push_back(radial_block(grid, particle, v, n, 0.0, true));
    const auto& b = blocks.back();
    for (int k = 0; k < std::min<int>(count, b.values.size()); ++k) cand.push_back({b.values(k), n, k});
  }
  std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
    return a.e != b.e ? a.e < b.e : a.n < b.n;
  });
  if (static_cast<int>(cand.size()) > count) cand.resize(count);

  const int mt = grid.angular_points();
  std::vector<JointEigenstate> out;
  for (const auto& c : cand) {
    const auto& b = blocks[c.n + nmax];
    StateVector s(grid.size());
    for (int i = 0; i < grid.radial_points(); ++i) {
      for (int j = 0; j < mt; ++j) {
        s(grid.index(i, j)) = b.vectors(i, c.k) * std::polar(1.0 / std::sqrt(double(mt)), c.n * grid.theta(j));
      }
    }
    out.push_back({c.e, c.n, std::move(s)});
  }
  return out;
}

std::vector<RotatingLevel> rotating_spectrum(const PolarGrid& grid, const Particle& particle,
                                             const RadialPotential& potential, double omega, int count) {
  const auto v = sample_potential(grid, potential);
  std::vector<RotatingLevel> out;
  const int nmax = grid.max_mode();
  for (int n = -nmax; n <= nmax; ++n) {
    const auto b = radial_block(grid, particle, v, n, -omega * n * particle.units.hbar(), false);
    for (int k = 0; k < std::min<int>(count, b.values.size()); ++k) out.push_back({b.values(k), n});
  }
  std::sort(out.begin(), out.end(), [](const RotatingLevel& a, const RotatingLevel& b) {
    return a.energy != b.energy ? a.energy < b.energy : a.n < b.n;
  });
  if (static_cast<int>(out.size()) > count) out.resize(count);
  return out;
}

std::vector<double> angular_momentum_spectrum(const OperatorMatrix& lz) {
  const int mt = lz.grid.angular_points();
  Eigen::MatrixXcd ring = Eigen::MatrixXcd::Zero(mt, mt);
  for (int j = 0; j < mt; ++j) {
    for (SparseOperator::InnerIterator it(lz.matrix, j); it; ++it) {
      if (it.col() < mt) ring(j, it.col()) = it.value();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ring, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + mt);
  return out;
}

}  // namespace gaugelab::rotating
