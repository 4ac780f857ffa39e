#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "gaugelab/ring/ring_model.hpp"

using namespace gaugelab;
using namespace gaugelab::ring;

namespace {

RingConfig ring_at(double quanta, int cutoff = 32) {
  RingConfig c;
  c.flux = Flux::quanta(quanta, c.units);
  c.mode_cutoff = cutoff;
  return c;
}

std::vector<double> sorted(const std::vector<Level>& levels) {
  std::vector<double> e;
  for (const auto& l : levels) e.push_back(l.energy);
  std::sort(e.begin(), e.end());
  return e;
}

/// Oracle: dense finite-difference ring Hamiltonian with the flux as a twist
/// of the hopping phase, diagonalised directly.
std::vector<double> dense_ring_levels(const RingConfig& c, int points) {
  const double h = kTwoPi / points;
  const double f = c.reduced_flux();
  const double scale = c.energy_scale() / (h * h);
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(points, points);
  const std::complex<double> hop = std::polar(1.0, -h * f);
  for (int k = 0; k < points; ++k) {
    const int next = (k + 1) % points;
    H(k, k) = 2.0 * scale;
    H(k, next) = -scale * hop;
    H(next, k) = -scale * std::conj(hop);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  const auto& v = es.eigenvalues();
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("spectrum agrees with a dense finite-difference diagonalisation") {
  for (double q : {0.0, 0.2, 0.5, 0.9}) {
    const RingConfig c = ring_at(q);
    const auto exact = sorted(spectrum(c));
    const auto dense = dense_ring_levels(c, 1024);
    for (int k = 0; k < 6; ++k) {
      CHECK(dense[k] == doctest::Approx(exact[k]).epsilon(1e-4));
    }
  }
}

TEST_CASE("spectrum is periodic in the flux quantum and degenerate at half flux") {
  for (double q : {0.0, 0.1, 0.5, 0.77}) {
    const auto a = spectrum(ring_at(q));
    const auto b = spectrum(ring_at(q + 1.0));
    for (std::size_t k = 0; k + 1 < a.size(); ++k) CHECK(std::abs(b[k + 1].energy - a[k].energy) <= 1e-12);
  }
  const auto e = sorted(spectrum(ring_at(0.5)));
  CHECK(std::abs(e[1] - e[0]) <= 1e-12);
  CHECK(ground_mode(ring_at(0.5)) == 0);  // tie goes to smaller |n|
  CHECK(ground_mode(ring_at(0.7)) == 1);
  CHECK(ground_mode(ring_at(-1.2)) == -1);
}

TEST_CASE("charge 2e halves the flux period") {
  RingConfig c = ring_at(0.25);
  c.charge = Charge::elementary(2.0, c.units);
  CHECK(c.reduced_flux() == doctest::Approx(0.5));
  const auto e = sorted(spectrum(c));
  CHECK(std::abs(e[1] - e[0]) <= 1e-12);
}

TEST_CASE("persistent current matches a central difference of E_n(Phi)") {
  const double h = 1e-5;
  for (double q : {0.1, 0.3, 0.45}) {
    for (int n : {-1, 0, 2}) {
      const RingConfig c = ring_at(q);
      auto energy = [&](double dq) { return spectrum(ring_at(q + dq))[static_cast<std::size_t>(n + 32)].energy; };
      const double dphi = h * c.units.flux_quantum();
      const double fd = -(energy(h) - energy(-h)) / (2.0 * dphi);
      CHECK(persistent_current(c, n) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("angular velocity is the drift rate of a packet's mean angle") {
  // Packet over modes, a_n ~ exp(-(n - 3)^2 / 8). The mean angle
  // arg <e^{i theta}> = arg sum conj(a_{n+1}) a_n exp(i (E_{n+1} - E_n) t / hbar) is
  // differentiated at t = 0 by central differences.
  const RingConfig c = ring_at(0.3);
  const int N = c.mode_cutoff;
  std::vector<std::complex<double>> a(2 * N + 1);
  double norm = 0.0;
  for (int n = -N; n <= N; ++n) {
    a[n + N] = std::exp(-(n - 3.0) * (n - 3.0) / 8.0);
    norm += std::norm(a[n + N]);
  }
  for (auto& x : a) x /= std::sqrt(norm);
  const RingState state(N, a);
  const auto levels = spectrum(c);
  auto mean_angle = [&](double t) {
    std::complex<double> s = 0.0;
    for (int n = -N; n < N; ++n) {
      const double de = levels[n + N + 1].energy - levels[n + N].energy;
      s += std::conj(a[n + N + 1]) * a[n + N] * std::polar(1.0, de * t / c.units.hbar());
    }
    return std::arg(s);
  };
  const double h = 1e-4;
  const double fd = (mean_angle(h) - mean_angle(-h)) / (2.0 * h);
  CHECK(angular_velocity(c, state) == doctest::Approx(fd).epsilon(1e-6));
  // Pure mode at half flux: -hbar / (2 m R^2).
  CHECK(angular_velocity(ring_at(0.5), RingState::pure(N, 0)) == doctest::Approx(-0.5));
}

TEST_CASE("flux ramp matches an adaptive ODE integration of the mode amplitudes") {
  RingConfig c = ring_at(0.0, 6);
  const auto schedule = FluxSchedule::ramp(Flux(0.0), Flux::quanta(0.5, c.units), 3.0);
  std::vector<std::complex<double>> a0(13);
  for (int k = 0; k < 13; ++k) a0[k] = std::polar(1.0 / std::sqrt(13.0), 0.3 * k);
  const RingState initial(6, a0);
  const RingState ramped = evolve_ramp(c, initial, schedule);

  // Oracle: i hbar da_n/dt = E_n(Phi(t)) a_n with Dormand-Prince at tight tolerance.
  using State = std::vector<double>;  // re, im interleaved
  State y(26);
  for (int k = 0; k < 13; ++k) {
    y[2 * k] = a0[k].real();
    y[2 * k + 1] = a0[k].imag();
  }
  auto rhs = [&](const State& s, State& ds, double t) {
    const auto levels = spectrum(c.with_flux(schedule.at(t)));
    for (int k = 0; k < 13; ++k) {
      const double w = levels[k].energy / c.units.hbar();
      ds[2 * k] = w * s[2 * k + 1];
      ds[2 * k + 1] = -w * s[2 * k];
    }
  };
  namespace ode = boost::numeric::odeint;
  ode::integrate_adaptive(ode::make_controlled(1e-13, 1e-13, ode::runge_kutta_dopri5<State>()), rhs, y, 0.0,
                          schedule.duration(), 1e-3);
  for (int k = 0; k < 13; ++k) {
    const std::complex<double> ref(y[2 * k], y[2 * k + 1]);
    CHECK(std::abs(ramped.amplitudes()[k] - ref) <= 1e-8);
    CHECK(std::abs(ramped.occupation(k - 6) - initial.occupation(k - 6)) <= 1e-12);
  }
}

TEST_CASE("adiabatic rule: the ramped state keeps its mode") {
  const RingConfig c = ring_at(0.0);
  const auto out = adiabatic_rule(c, FluxSchedule::ramp(Flux(0.0), Flux::quanta(0.5, c.units), 10.0));
  CHECK(out.ramped_mode == 0);
  CHECK(out.ramped_velocity == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(out.ramped_energy == doctest::Approx(out.ground_energy));
  const auto beyond = adiabatic_rule(c, FluxSchedule::ramp(Flux(0.0), Flux::quanta(0.9, c.units), 10.0));
  CHECK(beyond.ramped_mode == 0);
  CHECK(beyond.ground_mode == 1);
  CHECK(beyond.ramped_energy > beyond.ground_energy);
}

TEST_CASE("ring config validation and csv output") {
  RingConfig c = ring_at(0.2);
  c.radius = -1.0;
  CHECK_THROWS_AS(c.validate(), InvalidArgument);
  std::ostringstream os;
  write_spectrum_csv(os, ring_at(0.2, 2));
  const std::string text = os.str();
  CHECK(text.rfind("#", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 2 + 5);
}

TEST_CASE("ground-state angular velocity vanishes only at integer flux") {
  for (int k = -8; k <= 8; ++k) {
    const double q = k / 8.0;
    const RingConfig c = ring_at(q);
    const double v = angular_velocity(c, ground_state(c));
    if (k % 8 == 0) {
      CHECK(std::abs(v) < 1e-15);
    } else {
      CHECK(std::abs(v) > 0.1);
      CHECK(std::abs(v) <= 0.5 + 1e-12);  // |n - Phi/Phi0| <= 1/2 for the ground mode
    }
  }
}
