#include "gaugelab/core/phase.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gaugelab::core {

double ab_phase(Charge q, Flux phi, const UnitSystem& u) {
  return q.value() * phi.value() / (u.hbar() * u.c());
}

double mod_2pi(double angle) {
  const double turns = angle / kTwoPi;
  double frac = turns - std::round(turns);
  // round() sends +-0.5 away from zero; fold -0.5 onto the closed end of (-pi, pi].
  if (frac <= -0.5) frac += 1.0;
  if (frac == 0.0) return 0.0;
  return frac * kTwoPi;
}

std::vector<ScalingPoint> scaling_series(std::span<const double> lambdas, Charge base_q, Flux base_phi,
                                         const UnitSystem& u) {
  std::vector<ScalingPoint> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
      throw InvalidArgument("scaling_series: lambda must be finite and > 0, got " + std::to_string(lambda));
    }
    const Charge q(lambda * base_q.value());
    const Flux phi(base_phi.value() / lambda);
    out.push_back({lambda, ab_phase(q, phi, u), q.value() * q.value()});
  }
  return out;
}

namespace {

// Signed angle subtended at the origin by segment a->b, in (-pi, pi).
double segment_angle(Vec2 a, Vec2 b, std::size_t index) {
  const double scale = std::max(norm(a), norm(b));
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? -dot(a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dist = norm(a + t * ab);
  if (scale == 0.0 || dist <= 1e-12 * scale) {
    throw DegenerateGeometry("path segment " + std::to_string(index) + " passes through the winding origin");
  }
  return std::atan2(cross(a, b), dot(a, b));
}

}  // namespace

double swept_angle(const PlanarPath& path, Vec2 origin) {
  const auto& v = path.vertices();
  double total = 0.0;
  for (std::size_t k = 0; k < path.segment_count(); ++k) {
    const Vec2 a = v[k] - origin;
    const Vec2 b = v[(k + 1) % v.size()] - origin;
    total += segment_angle(a, b, k);
  }
  return total;
}

int winding_number(const PlanarPath& path, Vec2 origin) {
  if (!path.closed()) throw InvalidArgument("winding_number requires a closed path");
  return static_cast<int>(std::lround(swept_angle(path, origin) / kTwoPi));
}

double gauge_function_gradient_phase(double alpha, const PlanarPath& path, Vec2 origin) {
  if (path.closed()) return alpha * kTwoPi * winding_number(path, origin);
  return alpha * swept_angle(path, origin);
}

}  // namespace gaugelab::core
