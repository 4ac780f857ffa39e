#pragma once

#include <cmath>
#include <vector>

#include "gaugelab/core/error.hpp"

namespace gaugelab {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
  friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
  friend Vec2 operator-(Vec2 a) { return {-a.x, -a.y}; }
  friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
  friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
  friend bool operator==(const Vec2&, const Vec2&) = default;
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }

/// Ordered polyline in the plane. A closed path joins its last vertex back to
/// the first implicitly, so the first vertex must not be repeated at the end.
class PlanarPath {
 public:
  PlanarPath(std::vector<Vec2> vertices, bool closed) : vertices_(std::move(vertices)), closed_(closed) {
    if (vertices_.size() < 2) throw InvalidArgument("PlanarPath needs at least 2 vertices");
    if (closed_ && vertices_.front() == vertices_.back()) {
      throw InvalidArgument("closed PlanarPath must not repeat its first vertex; closure is implicit");
    }
  }

  const std::vector<Vec2>& vertices() const noexcept { return vertices_; }
  bool closed() const noexcept { return closed_; }
  std::size_t segment_count() const noexcept { return closed_ ? vertices_.size() : vertices_.size() - 1; }

 private:
  std::vector<Vec2> vertices_;
  bool closed_;
};

}  // namespace gaugelab
