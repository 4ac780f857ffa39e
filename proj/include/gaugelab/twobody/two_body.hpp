#pragma once

#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "gaugelab/core/geometry.hpp"

namespace gaugelab::twobody {

/// Two planar particles coupled by (v1 - v2) . A(r1 - r2) with A = alpha grad(phi12).
struct TwoBodyConfig {
  double m1 = 1.0;
  double m2 = 1.0;
  double alpha = 0.5;

  void validate() const;
};

/// Uniformly sampled positions and velocities of both particles.
class TwoBodyTrajectory {
 public:
  TwoBodyTrajectory(double dt, std::vector<Vec2> r1, std::vector<Vec2> r2, std::vector<Vec2> v1,
                    std::vector<Vec2> v2);

  /// Velocities from second-order finite differences of the positions.
  static TwoBodyTrajectory from_positions(double dt, std::vector<Vec2> r1, std::vector<Vec2> r2);

  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return r1_.size(); }
  const std::vector<Vec2>& r1() const noexcept { return r1_; }
  const std::vector<Vec2>& r2() const noexcept { return r2_; }
  const std::vector<Vec2>& v1() const noexcept { return v1_; }
  const std::vector<Vec2>& v2() const noexcept { return v2_; }

  /// Rigidly shift both particles by `d` at every sample.
  TwoBodyTrajectory translated(Vec2 d) const;
  TwoBodyTrajectory reversed() const;

 private:
  double dt_;
  std::vector<Vec2> r1_, r2_, v1_, v2_;
};

/// Angle of r2 - r1 against the +x axis, in (-pi, pi].
double relative_angle(Vec2 r1, Vec2 r2);

/// A(d) = alpha (-d_y, d_x) / |d|^2
Vec2 relative_potential(double alpha, Vec2 d);

struct CanonicalMomenta {
  Vec2 p1;
  Vec2 p2;
};

/// p1 = m1 v1 + A(r1 - r2), p2 = m2 v2 - A(r1 - r2)
CanonicalMomenta canonical_momenta(const TwoBodyConfig& cfg, Vec2 v1, Vec2 v2, Vec2 r1, Vec2 r2);

/// alpha times the unwrapped change of phi12 along the trajectory; equal to the
/// time integral of the interaction term. Rejects steps where phi12 jumps by
/// pi/2 or more, which would make the unwrapping ambiguous.
double encircling_phase(const TwoBodyConfig& cfg, const TwoBodyTrajectory& traj);

struct FieldCheck {
  double max_field;            ///< max |B| over all sample points
  double max_field_resolved;   ///< max |B| over points the stencil resolves
  std::vector<std::size_t> excluded;  ///< points within the near-coincidence region
};

/// B = dA_y/dx - dA_x/dy by central differences of step h at each relative
/// displacement. Points with |d| < 100 h are flagged: the stencil cannot
/// resolve the singular neighbourhood of the coincidence point there.
FieldCheck field_vanishing_check(const TwoBodyConfig& cfg, std::span<const Vec2> displacements, double h = 1e-4);

/// Read `t,x1,y1,x2,y2` rows (header line and `#` comments allowed).
TwoBodyTrajectory read_trajectory_csv(std::istream& is);
void write_trajectory_csv(std::ostream& os, const TwoBodyTrajectory& traj);

/// Particle 1 at rest at `center`, particle 2 circling it `loops` times
/// (negative for clockwise) at radius `radius` with `samples_per_loop` steps.
TwoBodyTrajectory orbit_trajectory(Vec2 center, double radius, int loops, int samples_per_loop, double period = 1.0);

}  // namespace gaugelab::twobody
