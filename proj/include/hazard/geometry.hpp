#pragma once

#include <cmath>

namespace hazard {

// Planar coordinate in km. The depot sits at the origin.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) noexcept {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

inline double norm(const Point& p) noexcept { return distance(p, Point{}); }

}  // namespace hazard
