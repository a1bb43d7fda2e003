#pragma once

#include <cmath>
#include <vector>

namespace rownav {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  double dot(const Vec2& o) const { return x * o.x + y * o.y; }
  double norm() const { return std::sqrt(x * x + y * y); }
};

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  Vec3 normalized() const {
    double n = norm();
    return {x / n, y / n, z / n};
  }
};

/// Wrap an angle to (-pi, pi].
inline double wrap_angle(double a) {
  constexpr double two_pi = 6.283185307179586476925286766559;
  a = std::fmod(a, two_pi);
  if (a <= -3.14159265358979323846) a += two_pi;
  if (a > 3.14159265358979323846) a -= two_pi;
  return a;
}

struct PathProjection {
  double arc_length = 0.0;      // distance along the polyline to the closest point
  double distance = 0.0;        // unsigned lateral distance
  Vec2 point;                   // closest point on the polyline
  double tangent_heading = 0.0; // heading of the segment holding the closest point
};

/// Piecewise-linear planar curve with arc-length queries.
class Polyline {
 public:
  Polyline() = default;
  explicit Polyline(std::vector<Vec2> points);

  const std::vector<Vec2>& points() const { return points_; }
  double length() const { return cumulative_.empty() ? 0.0 : cumulative_.back(); }
  bool empty() const { return points_.size() < 2; }

  /// Closest point on the curve, scanning all segments.
  PathProjection project(const Vec2& p) const;

  Vec2 point_at(double s) const;
  double heading_at(double s) const;

 private:
  std::vector<Vec2> points_;
  std::vector<double> cumulative_;  // cumulative_[i] = arc length up to points_[i]
};

/// Distance from a point to a segment, plus the parameter of the closest point.
double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out = nullptr);

}  // namespace rownav
