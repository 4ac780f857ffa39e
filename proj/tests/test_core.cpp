#include <doctest.h>

#include <cmath>
#include <vector>

#include "gaugelab/core/phase.hpp"

using namespace gaugelab;
using namespace gaugelab::core;

namespace {

PlanarPath circle(Vec2 c, double r, int n, int turns = 1) {
  std::vector<Vec2> v;
  const int total = n * std::abs(turns);
  for (int k = 0; k < total; ++k) {
    const double t = (turns < 0 ? -1.0 : 1.0) * kTwoPi * k / n;
    v.push_back({c.x + r * std::cos(t), c.y + r * std::sin(t)});
  }
  return {v, true};
}

}  // namespace

TEST_CASE("ab_phase is q Phi / hbar c in any unit system") {
  const UnitSystem natural;
  CHECK(ab_phase(Charge(1.0), Flux::quanta(1.0, natural), natural) == doctest::Approx(kTwoPi));
  const UnitSystem cgs(1.0546e-27, 2.9979e10, 4.8032e-10);
  // One flux quantum hc/e for charge e is 2 pi regardless of the constants.
  CHECK(ab_phase(Charge::elementary(1.0, cgs), Flux::quanta(1.0, cgs), cgs) == doctest::Approx(kTwoPi).epsilon(1e-14));
  CHECK(ab_phase(Charge::elementary(2.0, cgs), Flux::quanta(0.5, cgs), cgs) == doctest::Approx(kTwoPi).epsilon(1e-14));
  // Not reduced.
  CHECK(ab_phase(Charge(1.0), Flux::quanta(3.0, natural), natural) == doctest::Approx(3.0 * kTwoPi));
}

TEST_CASE("mod_2pi lands in (-pi, pi] and is exact on multiples of 2 pi") {
  for (int k = -7; k <= 7; ++k) CHECK(mod_2pi(k * kTwoPi) == 0.0);
  CHECK(mod_2pi(kPi) == doctest::Approx(kPi));
  CHECK(mod_2pi(-kPi) == doctest::Approx(kPi));
  CHECK(mod_2pi(3.0 * kPi) == doctest::Approx(kPi));
  CHECK(mod_2pi(0.25) == doctest::Approx(0.25));
  CHECK(mod_2pi(-0.25 - kTwoPi) == doctest::Approx(-0.25));
  for (double x = -20.0; x < 20.0; x += 0.37) {
    const double r = mod_2pi(x);
    CHECK(r > -kPi);
    CHECK(r <= kPi);
    CHECK(std::remainder(r - x, kTwoPi) == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("winding numbers of circles, figure eights and offsets") {
  CHECK(winding_number(circle({}, 1.0, 64), {}) == 1);
  CHECK(winding_number(circle({}, 1.0, 64, 3), {}) == 3);
  CHECK(winding_number(circle({}, 1.0, 64, -2), {}) == -2);
  CHECK(winding_number(circle({5.0, 0.0}, 1.0, 64), {}) == 0);
  CHECK(swept_angle(circle({}, 2.0, 128), {0.3, -0.4}) == doctest::Approx(kTwoPi));
}

TEST_CASE("degenerate paths are rejected") {
  CHECK_THROWS_AS(swept_angle(PlanarPath({{-1.0, 0.0}, {1.0, 0.0}}, false), {}), DegenerateGeometry);
  CHECK_THROWS_AS(PlanarPath({{0.0, 0.0}}, false), InvalidArgument);
  CHECK_THROWS_AS(PlanarPath({{0.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}, true), InvalidArgument);
  CHECK_THROWS_AS(winding_number(PlanarPath({{1.0, 0.0}, {0.0, 1.0}}, false), {}), InvalidArgument);
}

TEST_CASE("gradient phase matches a fine line integral of alpha grad(phi)") {
  // Oracle: midpoint rule with 1e4 sub-segments per edge of A = alpha grad(phi) = alpha (-y, x) / r^2.
  const double alpha = 0.37;
  const PlanarPath open({{2.0, -1.0}, {1.5, 1.0}, {-0.5, 2.0}, {-2.0, 0.5}}, false);
  double integral = 0.0;
  const auto& v = open.vertices();
  for (std::size_t s = 0; s + 1 < v.size(); ++s) {
    const int n = 10000;
    const Vec2 d = (1.0 / n) * (v[s + 1] - v[s]);
    for (int k = 0; k < n; ++k) {
      const Vec2 p = v[s] + (k + 0.5) * d;
      const double r2 = dot(p, p);
      integral += alpha * (-p.y * d.x + p.x * d.y) / r2;
    }
  }
  CHECK(gauge_function_gradient_phase(alpha, open, {}) == doctest::Approx(integral).epsilon(1e-8));
  CHECK(gauge_function_gradient_phase(alpha, circle({}, 1.0, 16, 2), {}) == doctest::Approx(2.0 * kTwoPi * alpha));
}

TEST_CASE("scaling_series keeps the phase and scales the force proxy by lambda^2") {
  const UnitSystem u;
  const std::vector<double> lambdas = {1.0, 0.5, 0.25, 3.0};
  const auto s = scaling_series(lambdas, Charge(1.0), Flux::quanta(0.5, u), u);
  REQUIRE(s.size() == 4);
  for (const auto& p : s) {
    CHECK(std::abs(p.phase - kPi) <= 1e-12);
    CHECK(std::abs(p.force_metric - p.lambda * p.lambda) <= 1e-12);
  }
  const std::vector<double> bad = {1.0, -1.0};
  CHECK_THROWS_AS(scaling_series(bad, Charge(1.0), Flux(1.0), u), InvalidArgument);
}

TEST_CASE("unit system validation") {
  CHECK_THROWS_AS(UnitSystem(0.0, 1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(UnitSystem(1.0, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Flux(std::nan("")), InvalidArgument);
  CHECK(UnitSystem().flux_quantum() == doctest::Approx(kTwoPi));
}
