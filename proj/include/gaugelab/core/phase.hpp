#pragma once

#include <span>
#include <vector>

#include "gaugelab/core/geometry.hpp"
#include "gaugelab/core/units.hpp"

namespace gaugelab::core {

/// Aharonov-Bohm phase q*Phi/(hbar*c) in radians. Not reduced mod 2*pi.
double ab_phase(Charge q, Flux phi, const UnitSystem& u);

/// Reduce an angle to (-pi, pi].
///
/// The reduction goes through the number of turns so that an exact multiple of
/// 2*pi (as produced by ab_phase) lands on 0.0 rather than on a rounding
/// residue of the subtraction.
double mod_2pi(double angle);

struct ScalingPoint {
  double lambda;
  double phase;
  /// Proxy for the image-current force: q^2 times a unit geometry factor.
  double force_metric;
};

/// Scale charge by lambda and flux by 1/lambda; the phase stays put while the
/// force proxy falls as lambda^2.
std::vector<ScalingPoint> scaling_series(std::span<const double> lambdas, Charge base_q, Flux base_phi,
                                         const UnitSystem& u);

/// Sum of signed angle increments (each in (-pi, pi]) swept around `origin`.
/// Throws DegenerateGeometry if any segment touches the origin.
double swept_angle(const PlanarPath& path, Vec2 origin);

/// Signed counterclockwise winding number of a closed path about `origin`.
int winding_number(const PlanarPath& path, Vec2 origin);

/// Line integral of grad(alpha * phi) along the path, phi being the polar angle
/// about `origin`. Closed paths give exactly 2*pi*alpha*winding.
double gauge_function_gradient_phase(double alpha, const PlanarPath& path, Vec2 origin);

}  // namespace gaugelab::core
