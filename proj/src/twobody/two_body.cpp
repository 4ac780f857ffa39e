#include "gaugelab/twobody/two_body.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "gaugelab/core/units.hpp"

namespace gaugelab::twobody {

void TwoBodyConfig::validate() const {
  if (!(m1 > 0.0) || !(m2 > 0.0)) throw InvalidArgument("two-body: masses must be > 0");
  if (!std::isfinite(alpha)) throw InvalidArgument("two-body: alpha must be finite");
}

TwoBodyTrajectory::TwoBodyTrajectory(double dt, std::vector<Vec2> r1, std::vector<Vec2> r2, std::vector<Vec2> v1,
                                     std::vector<Vec2> v2)
    : dt_(dt), r1_(std::move(r1)), r2_(std::move(r2)), v1_(std::move(v1)), v2_(std::move(v2)) {
  if (!(dt_ > 0.0)) throw InvalidArgument("trajectory: dt must be > 0");
  const auto n = r1_.size();
  if (n < 2) throw InvalidArgument("trajectory: needs at least 2 samples");
  if (r2_.size() != n || v1_.size() != n || v2_.size() != n) {
    throw InvalidArgument("trajectory: position and velocity series differ in length");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (r1_[k] == r2_[k]) throw DegenerateGeometry("trajectory: particles coincide at sample " + std::to_string(k));
  }
}

namespace {

std::vector<Vec2> differentiate(const std::vector<Vec2>& r, double dt) {
  const auto n = r.size();
  std::vector<Vec2> v(n);
  if (n < 3) {
    for (auto& x : v) x = (1.0 / dt) * (r.back() - r.front());
    return v;
  }
  v[0] = (1.0 / (2.0 * dt)) * (-3.0 * r[0] + 4.0 * r[1] - r[2]);
  for (std::size_t k = 1; k + 1 < n; ++k) v[k] = (1.0 / (2.0 * dt)) * (r[k + 1] - r[k - 1]);
  v[n - 1] = (1.0 / (2.0 * dt)) * (3.0 * r[n - 1] - 4.0 * r[n - 2] + r[n - 3]);
  return v;
}

}  // namespace

TwoBodyTrajectory TwoBodyTrajectory::from_positions(double dt, std::vector<Vec2> r1, std::vector<Vec2> r2) {
  if (r1.size() < 2 || r2.size() != r1.size()) throw InvalidArgument("trajectory: bad position series");
  auto v1 = differentiate(r1, dt);
  auto v2 = differentiate(r2, dt);
  return {dt, std::move(r1), std::move(r2), std::move(v1), std::move(v2)};
}

TwoBodyTrajectory TwoBodyTrajectory::translated(Vec2 d) const {
  auto a = r1_;
  auto b = r2_;
  for (auto& p : a) p = p + d;
  for (auto& p : b) p = p + d;
  return {dt_, std::move(a), std::move(b), v1_, v2_};
}

TwoBodyTrajectory TwoBodyTrajectory::reversed() const {
  std::vector<Vec2> a(r1_.rbegin(), r1_.rend()), b(r2_.rbegin(), r2_.rend());
  std::vector<Vec2> va(v1_.rbegin(), v1_.rend()), vb(v2_.rbegin(), v2_.rend());
  for (auto& v : va) v = -v;
  for (auto& v : vb) v = -v;
  return {dt_, std::move(a), std::move(b), std::move(va), std::move(vb)};
}

double relative_angle(Vec2 r1, Vec2 r2) {
  if (r1 == r2) throw DegenerateGeometry("relative_angle: particles coincide");
  const Vec2 d = r2 - r1;
  const double phi = std::atan2(d.y, d.x);
  return phi == -kPi ? kPi : phi;
}

Vec2 relative_potential(double alpha, Vec2 d) {
  const double r2 = dot(d, d);
  if (r2 == 0.0) throw DegenerateGeometry("relative potential is singular at coincidence");
  return {-alpha * d.y / r2, alpha * d.x / r2};
}

CanonicalMomenta canonical_momenta(const TwoBodyConfig& cfg, Vec2 v1, Vec2 v2, Vec2 r1, Vec2 r2) {
  cfg.validate();
  if (r1 == r2) throw DegenerateGeometry("canonical_momenta: particles coincide");
  const Vec2 a = relative_potential(cfg.alpha, r1 - r2);
  return {cfg.m1 * v1 + a, cfg.m2 * v2 - a};
}

double encircling_phase(const TwoBodyConfig& cfg, const TwoBodyTrajectory& traj) {
  cfg.validate();
  double swept = 0.0;
  for (std::size_t k = 1; k < traj.size(); ++k) {
    const Vec2 a = traj.r2()[k - 1] - traj.r1()[k - 1];
    const Vec2 b = traj.r2()[k] - traj.r1()[k];
    const double step = std::atan2(cross(a, b), dot(a, b));
    if (std::abs(step) >= 0.5 * kPi) {
      throw InvalidArgument("encircling_phase: relative angle jumps by " + std::to_string(step) + " rad at sample " +
                            std::to_string(k) + "; resample the trajectory more finely");
    }
    swept += step;
  }
  return cfg.alpha * swept;
}

FieldCheck field_vanishing_check(const TwoBodyConfig& cfg, std::span<const Vec2> displacements, double h) {
  if (!(h > 0.0)) throw InvalidArgument("field_vanishing_check: step must be > 0");
  FieldCheck out{0.0, 0.0, {}};
  for (std::size_t k = 0; k < displacements.size(); ++k) {
    const Vec2 d = displacements[k];
    if (d == Vec2{}) throw DegenerateGeometry("field_vanishing_check: zero displacement");
    const Vec2 xp = relative_potential(cfg.alpha, d + Vec2{h, 0.0});
    const Vec2 xm = relative_potential(cfg.alpha, d - Vec2{h, 0.0});
    const Vec2 yp = relative_potential(cfg.alpha, d + Vec2{0.0, h});
    const Vec2 ym = relative_potential(cfg.alpha, d - Vec2{0.0, h});
    const double b = std::abs((xp.y - xm.y) / (2.0 * h) - (yp.x - ym.x) / (2.0 * h));
    out.max_field = std::max(out.max_field, b);
    if (norm(d) < 100.0 * h) {
      out.excluded.push_back(k);
    } else {
      out.max_field_resolved = std::max(out.max_field_resolved, b);
    }
  }
  return out;
}

TwoBodyTrajectory read_trajectory_csv(std::istream& is) {
  std::vector<double> t;
  std::vector<Vec2> r1, r2;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (std::isalpha(static_cast<unsigned char>(line[0]))) continue;  // header row
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double tt, x1, y1, x2, y2;
    if (!(row >> tt >> x1 >> y1 >> x2 >> y2)) {
      throw InvalidArgument("trajectory CSV line " + std::to_string(lineno) + ": expected t,x1,y1,x2,y2");
    }
    t.push_back(tt);
    r1.push_back({x1, y1});
    r2.push_back({x2, y2});
  }
  if (t.size() < 2) throw InvalidArgument("trajectory CSV: needs at least 2 rows");
  const double dt = t[1] - t[0];
  for (std::size_t k = 1; k < t.size(); ++k) {
    if (std::abs((t[k] - t[k - 1]) - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      throw InvalidArgument("trajectory CSV: time step is not uniform at row " + std::to_string(k + 1));
    }
  }
  return TwoBodyTrajectory::from_positions(dt, std::move(r1), std::move(r2));
}

void write_trajectory_csv(std::ostream& os, const TwoBodyTrajectory& traj) {
  os << "# gaugelab two-body-trajectory v1\n";
  os << "t,x1,y1,x2,y2\n";
  os.precision(17);
  for (std::size_t k = 0; k < traj.size(); ++k) {
    os << k * traj.dt() << ',' << traj.r1()[k].x << ',' << traj.r1()[k].y << ',' << traj.r2()[k].x << ','
       << traj.r2()[k].y << '\n';
  }
}

TwoBodyTrajectory orbit_trajectory(Vec2 center, double radius, int loops, int samples_per_loop, double period) {
  if (!(radius > 0.0)) throw InvalidArgument("orbit_trajectory: radius must be > 0");
  if (samples_per_loop < 5) throw InvalidArgument("orbit_trajectory: need at least 5 samples per loop");
  const int turns = loops == 0 ? 1 : std::abs(loops);
  const double direction = loops < 0 ? -1.0 : 1.0;
  const int n = turns * samples_per_loop + 1;
  const double dt = period / samples_per_loop;
  const double omega = direction * kTwoPi / period;
  std::vector<Vec2> r1(n, center), r2(n), v1(n), v2(n);
  for (int k = 0; k < n; ++k) {
    // loops == 0: go out and back along the same half-arc, no net winding.
    double theta = omega * k * dt;
    double rate = omega;
    if (loops == 0) {
      const double s = static_cast<double>(k) / (n - 1);
      theta = kPi * (1.0 - std::abs(2.0 * s - 1.0));
      rate = (s < 0.5 ? 2.0 : -2.0) * kPi / period;
    }
    r2[k] = center + Vec2{radius * std::cos(theta), radius * std::sin(theta)};
    v2[k] = Vec2{-radius * rate * std::sin(theta), radius * rate * std::cos(theta)};
  }
  return {dt, std::move(r1), std::move(r2), std::move(v1), std::move(v2)};
}

}  // namespace gaugelab::twobody
