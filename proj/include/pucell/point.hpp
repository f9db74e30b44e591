#pragma once

#include <cmath>
#include <vector>

namespace pucell {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point2&, const Point2&) = default;
};

using PointList = std::vector<Point2>;

inline double distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

inline double squared_distance(const Point2& a, const Point2& b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

// Closed-ball membership, shared by every search path so that the cell
// search and the linear scan agree bit for bit.
inline bool within_radius(const Point2& p, const Point2& center, double radius) {
  return squared_distance(p, center) <= radius * radius;
}

inline bool in_unit_square(const Point2& p) {
  return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0;
}

}  // namespace pucell
