#include "rownav/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace rownav {

Polyline::Polyline(std::vector<Vec2> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw std::invalid_argument("polyline needs at least two points");
  cumulative_.resize(points_.size());
  cumulative_[0] = 0.0;
  for (std::size_t i = 1; i < points_.size(); ++i) {
    cumulative_[i] = cumulative_[i - 1] + (points_[i] - points_[i - 1]).norm();
  }
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b, double* t_out) {
  const Vec2 ab = b - a;
  const double len2 = ab.dot(ab);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  if (t_out) *t_out = t;
  return (p - (a + ab * t)).norm();
}

PathProjection Polyline::project(const Vec2& p) const {
  if (empty()) throw std::invalid_argument("cannot project onto an empty polyline");
  PathProjection best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < points_.size(); ++i) {
    double t = 0.0;
    const double d = point_segment_distance(p, points_[i], points_[i + 1], &t);
    if (d < best_dist) {
      best_dist = d;
      const Vec2 seg = points_[i + 1] - points_[i];
      best.distance = d;
      best.point = points_[i] + seg * t;
      best.arc_length = cumulative_[i] + seg.norm() * t;
      best.tangent_heading = std::atan2(seg.y, seg.x);
    }
  }
  return best;
}

Vec2 Polyline::point_at(double s) const {
  if (empty()) throw std::invalid_argument("empty polyline");
  if (s <= 0.0) return points_.front();
  if (s >= length()) return points_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  const double seg_len = cumulative_[i + 1] - cumulative_[i];
  const double t = seg_len > 0.0 ? (s - cumulative_[i]) / seg_len : 0.0;
  return points_[i] + (points_[i + 1] - points_[i]) * t;
}

double Polyline::heading_at(double s) const {
  if (empty()) throw std::invalid_argument("empty polyline");
  std::size_t i = 0;
  if (s > 0.0) {
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    i = static_cast<std::size_t>(it - cumulative_.begin());
    i = i == 0 ? 0 : std::min(i - 1, points_.size() - 2);
  }
  const Vec2 seg = points_[i + 1] - points_[i];
  return std::atan2(seg.y, seg.x);
}

}  // namespace rownav
