#pragma once

#include <cmath>
#include <compare>
#include <numbers>

namespace pwi {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Point2, Point2) = default;
};

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double norm2(Point2 a) { return dot(a, a); }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }

/// Integer lattice index j = (j1, j2).
struct LatticeIndex {
  int j1 = 0;
  int j2 = 0;
  friend constexpr auto operator<=>(LatticeIndex, LatticeIndex) = default;
};

/// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0, x1 = 0.0, y0 = 0.0, y1 = 0.0;

  constexpr double width() const { return x1 - x0; }
  constexpr double height() const { return y1 - y0; }
  constexpr double area() const { return width() * height(); }

  /// Smallest |xi| over the rectangle.
  double min_radius() const {
    const double dx = (x0 > 0.0) ? x0 : (x1 < 0.0 ? -x1 : 0.0);
    const double dy = (y0 > 0.0) ? y0 : (y1 < 0.0 ? -y1 : 0.0);
    return std::hypot(dx, dy);
  }
};

}  // namespace pwi
