#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstring>
#include <nlohmann/json.hpp>
#include <sstream>

#include "gaugelab/lattice/eigensolver.hpp"
#include "gaugelab/lattice/lattice.hpp"
#include "gaugelab/lattice/propagator.hpp"

using namespace gaugelab;
using namespace gaugelab::lattice;

namespace {

double width_x(const Wavefunction2D& psi) {
  const Lattice2D& lat = psi.lattice();
  const Vec2 m = mean_position(psi);
  double s = 0.0;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) s += std::norm(psi(i, j)) * std::pow(lat.x(i) - m.x, 2) * lat.a * lat.a;
  }
  return std::sqrt(s);
}

double max_diff(const Wavefunction2D& a, const Wavefunction2D& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.values().size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

}  // namespace

TEST_CASE("flux line links: one plaquette carries the flux, loops see it only when they enclose it") {
  const Lattice2D lat = Lattice2D::centered(16, 16, 1.0);
  const UnitSystem u;
  const FluxLine line{{7, 7}, Flux::quanta(0.3, u)};
  const LinkField links = build_flux_links(lat, line, Charge(1.0), u);
  for (int j = 0; j < lat.ny - 1; ++j) {
    for (int i = 0; i < lat.nx - 1; ++i) {
      const double expect = (i == 7 && j == 7) ? 0.3 * kTwoPi : 0.0;
      CHECK(links.plaquette_phase(i, j) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  // Square loop around the flux plaquette, counterclockwise.
  auto square = [](int i0, int j0, int i1, int j1) {
    std::vector<std::pair<int, int>> loop;
    for (int i = i0; i < i1; ++i) loop.push_back({i, j0});
    for (int j = j0; j < j1; ++j) loop.push_back({i1, j});
    for (int i = i1; i > i0; --i) loop.push_back({i, j1});
    for (int j = j1; j > j0; --j) loop.push_back({i0, j});
    return loop;
  };
  const auto around = square(3, 3, 11, 11);
  const auto beside = square(9, 1, 14, 4);
  CHECK(std::arg(links.holonomy(around)) == doctest::Approx(0.3 * kTwoPi));
  CHECK(std::abs(std::arg(links.holonomy(beside))) < 1e-12);
}

TEST_CASE("links from arbitrary plaquette phases reproduce them") {
  const Lattice2D lat = Lattice2D::centered(17, 16, 0.5);
  std::vector<double> phases;
  for (int k = 0; k < 16 * 15; ++k) phases.push_back(std::sin(1.7 * k) * 2.5);
  const LinkField links = links_from_plaquette_phases(lat, phases);
  for (int j = 0; j < 15; ++j) {
    for (int i = 0; i < 16; ++i) {
      CHECK(std::abs(std::arg(links.plaquette(i, j) * std::polar(1.0, -phases[j * 16 + i]))) < 1e-12);
    }
  }
}

TEST_CASE("gauge transformations leave plaquettes, velocities and dynamics covariant") {
  const Lattice2D lat = Lattice2D::centered(48, 40, 1.0);
  const UnitSystem u;
  const LinkField links = build_flux_links(lat, {{20, 18}, Flux::quanta(0.4, u)}, Charge(1.0), u);
  PotentialGrid pot(lat);
  pot.add_disc_wall({}, 3.0);
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) pot.v(i, j) = 0.001 * (lat.x(i) * lat.x(i));
  }
  Wavefunction2D psi = gaussian_packet(lat, {-8.0, 4.0}, 3.0, {0.4, -0.2});
  apply_walls(psi, pot);
  psi.normalize();

  const GaugeFunction chi = random_gauge(lat, 99);
  const auto g = gauge_transform(links, psi, chi);
  for (int j = 0; j < lat.ny - 1; ++j) {
    for (int i = 0; i < lat.nx - 1; ++i) CHECK(std::abs(g.links.plaquette(i, j) - links.plaquette(i, j)) < 1e-13);
  }
  const Vec2 v = mean_velocity(psi, links, 1.0, u);
  const Vec2 vg = mean_velocity(g.psi, g.links, 1.0, u);
  CHECK(std::abs(v.x - vg.x) < 1e-13);
  CHECK(std::abs(v.y - vg.y) < 1e-13);

  const Wavefunction2D a = evolve(psi, links, pot, 0.5, 60);
  const Wavefunction2D b = evolve(g.psi, g.links, pot, 0.5, 60);
  CHECK(max_diff(gauge_transform(a, chi), b) < 1e-12);
  CHECK(std::abs(std::abs(overlap(a, psi)) - std::abs(overlap(b, g.psi))) < 1e-12);
}

TEST_CASE("free packet spreads like the continuum Gaussian") {
  // Oracle: sigma(t)^2 = sigma^2 + (hbar t / (2 m sigma))^2 for a free particle.
  const Lattice2D lat = Lattice2D::centered(160, 160, 1.0);
  const PotentialGrid pot(lat);
  const LinkField links(lat);
  const double sigma = 6.0;
  Wavefunction2D psi = gaussian_packet(lat, {}, sigma, {});
  CHECK(width_x(psi) == doctest::Approx(sigma).epsilon(1e-6));
  const double t = 40.0;
  const Wavefunction2D out = evolve(psi, links, pot, 0.25, 160);
  const double expect = std::sqrt(sigma * sigma + std::pow(t / (2.0 * sigma), 2));
  CHECK(width_x(out) == doctest::Approx(expect).epsilon(5e-3));
  CHECK(std::abs(out.norm() - 1.0) < 1e-12);
}

TEST_CASE("covariant velocity matches the drift of <x>") {
  const Lattice2D lat = Lattice2D::centered(128, 96, 1.0);
  const UnitSystem u;
  const LinkField links = build_flux_links(lat, {{63, 47}, Flux::quanta(0.25, u)}, Charge(1.0), u);
  const PotentialGrid pot(lat);
  Wavefunction2D psi = gaussian_packet(lat, {-30.0, 10.0}, 6.0, {0.5, 0.2});
  const double dt = 0.05;
  Propagator prop(pot, 1.0, u, dt);
  prop.set_links(links);
  prop.evolve(psi, 20);
  const Vec2 x0 = mean_position(psi);
  const Vec2 v = mean_velocity(psi, links, 1.0, u);
  Wavefunction2D fwd = psi;
  prop.evolve(fwd, 2);
  const Vec2 x1 = mean_position(fwd);
  const double vx_fd = (x1.x - x0.x) / (2.0 * dt);
  const double vy_fd = (x1.y - x0.y) / (2.0 * dt);
  // Lattice group velocity (hbar / m a) sin(k a) < k.
  CHECK(v.x == doctest::Approx(vx_fd).epsilon(2e-3));
  CHECK(v.y == doctest::Approx(vy_fd).epsilon(2e-3));
  CHECK(v.x < 0.5);
  CHECK(v.x == doctest::Approx(std::sin(0.5)).epsilon(0.02));
}

TEST_CASE("norm is conserved to rounding with walls, traps and flux") {
  const Lattice2D lat = Lattice2D::centered(64, 64, 1.0);
  const UnitSystem u;
  PotentialGrid pot(lat);
  pot.add_disc_wall({}, 5.0);
  Propagator prop(pot, 1.0, u, 0.5);
  prop.set_links(build_flux_links(lat, {{31, 31}, Flux::quanta(0.5, u)}, Charge(1.0), u));
  Wavefunction2D psi = gaussian_packet(lat, {0.0, -15.0}, 3.0, {0.3, 0.0});
  apply_walls(psi, pot);
  psi.normalize();
  const HarmonicTrap trap{{0.0, -15.0}, 0.0625};
  for (int k = 0; k < 400; ++k) prop.step(psi, &trap, &trap);
  CHECK(std::abs(psi.norm() - 1.0) < 1e-12);
  double on_walls = 0.0;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      if (pot.wall(i, j)) on_walls += std::abs(psi(i, j));
    }
  }
  CHECK(on_walls == 0.0);
}

TEST_CASE("time-step guard quotes the bound") {
  const UnitSystem u;
  CHECK(max_time_step(1.0, 1.0, u) == doctest::Approx(1.0));
  CHECK(max_time_step(2.0, 0.5, u) == doctest::Approx(0.5));
  try {
    check_time_step(1.5, 1.0, 1.0, u);
    FAIL("expected StepBoundError");
  } catch (const StepBoundError& e) {
    CHECK(e.bound() == doctest::Approx(1.0));
    CHECK(std::string(e.what()).find("m a^2 / hbar") != std::string::npos);
  }
  CHECK_THROWS_AS(check_time_step(-0.1, 1.0, 1.0, u), StepBoundError);
  const Lattice2D lat = Lattice2D::centered(16, 16, 1.0);
  CHECK_THROWS_AS(Propagator(PotentialGrid(lat), 1.0, u, 2.0), StepBoundError);
}

TEST_CASE("sparse eigensolver agrees with dense diagonalisation") {
  const Lattice2D lat = Lattice2D::centered(16, 16, 1.0);
  const UnitSystem u;
  PotentialGrid pot(lat);
  pot.add_disc_wall({}, 1.5);
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) pot.v(i, j) = 0.02 * lat.y(j);
  }
  const LinkField links = build_flux_links(lat, {{7, 7}, Flux::quanta(0.3, u)}, Charge(1.0), u);
  const LatticeHamiltonian h = build_lattice_hamiltonian(links, pot, 1.0, u);
  const Eigen::MatrixXcd dense(h.matrix);
  CHECK((dense - dense.adjoint()).norm() < 1e-14);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense, Eigen::EigenvaluesOnly);
  const EigenPairs pairs = lowest_eigenpairs(h.matrix, 4);
  for (int k = 0; k < 4; ++k) {
    CHECK(pairs.values[k] == doctest::Approx(es.eigenvalues()[k]).epsilon(1e-10));
    CHECK(pairs.residuals[k] < 1e-10);
  }
  // Spectrum is gauge invariant.
  const LinkField g = gauge_transform(links, random_gauge(lat, 5));
  const EigenPairs gp = lowest_eigenpairs(build_lattice_hamiltonian(g, pot, 1.0, u).matrix, 4);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(gp.values[k] - pairs.values[k]) < 1e-10);
}

TEST_CASE("eigensolver reports non-convergence") {
  const Lattice2D lat = Lattice2D::centered(20, 20, 1.0);
  const UnitSystem u;
  const LatticeHamiltonian h = build_lattice_hamiltonian(LinkField(lat), PotentialGrid(lat), 1.0, u);
  EigenOptions opts;
  opts.max_iterations = 1;
  opts.tolerance = 1e-15;
  CHECK_THROWS_AS(lowest_eigenpairs(h.matrix, 3, opts), ConvergenceError);
}

TEST_CASE("density snapshot: JSON header line then little-endian doubles") {
  const Lattice2D lat = Lattice2D::centered(18, 16, 0.5);
  const Wavefunction2D psi = gaussian_packet(lat, {}, 0.7, {});
  std::ostringstream os;
  write_density_snapshot(os, psi, 12.5);
  const std::string s = os.str();
  const auto nl = s.find('\n');
  REQUIRE(nl != std::string::npos);
  const auto header = nlohmann::json::parse(s.substr(0, nl));
  CHECK(header.at("nx") == 18);
  CHECK(header.at("ny") == 16);
  CHECK(header.at("a") == 0.5);
  CHECK(header.at("t") == 12.5);
  REQUIRE(s.size() - nl - 1 == 288 * sizeof(double));
  const auto density = psi.density();
  for (int k = 0; k < 288; ++k) {
    double v;
    std::memcpy(&v, s.data() + nl + 1 + k * sizeof(double), sizeof(double));
    CHECK(v == density[k]);
  }
}

TEST_CASE("geometry helpers") {
  const Lattice2D lat = Lattice2D::centered(16, 16, 2.0);
  CHECK(lat.plaquette_center(7, 7).x == doctest::Approx(0.0));
  CHECK(lat.plaquette_center(7, 7).y == doctest::Approx(0.0));
  PotentialGrid pot(lat);
  pot.keep_annulus({}, 2.0, 5.0);
  int open = 0;
  for (int j = 0; j < lat.ny; ++j) {
    for (int i = 0; i < lat.nx; ++i) {
      const double r = norm(lat.position(i, j));
      CHECK(pot.wall(i, j) == !(r >= 2.0 && r <= 5.0));
      open += pot.wall(i, j) ? 0 : 1;
    }
  }
  CHECK(open > 0);
  CHECK_THROWS_AS(Lattice2D::centered(1, 5, 1.0).validate(), InvalidArgument);
}
