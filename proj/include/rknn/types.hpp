#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace rknn {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
constexpr Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
constexpr Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

constexpr double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }

// Squared distance. Every distance comparison in the library goes through this
// exact expression so that ties resolve identically everywhere.
constexpr double dist2(Point2 a, Point2 b) {
  const double dx = a.x - b.x;
  const double dy = a.y - b.y;
  return dx * dx + dy * dy;
}

inline double dist(Point2 a, Point2 b) { return std::sqrt(dist2(a, b)); }

inline bool is_finite(Point2 p) { return std::isfinite(p.x) && std::isfinite(p.y); }

/// Axis-aligned rectangle with strictly positive area.
struct Rect {
  Point2 min;
  Point2 max;

  double width() const { return max.x - min.x; }
  double height() const { return max.y - min.y; }
  double diagonal() const { return std::hypot(width(), height()); }
  double area() const { return width() * height(); }
  Point2 center() const { return {0.5 * (min.x + max.x), 0.5 * (min.y + max.y)}; }

  bool contains(Point2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }

  // Corners in fixed order: min-min, max-min, max-max, min-max (counter-clockwise).
  Point2 corner(int i) const {
    switch (i & 3) {
      case 0: return min;
      case 1: return {max.x, min.y};
      case 2: return max;
      default: return {min.x, max.y};
    }
  }
};

enum class ErrorKind {
  CoincidentFacilities,
  InvalidRect,
  InvalidArgument,
  QueryOutsideDomain,
  StaleZone,
  EmptyFacilitySet,
  InvalidQueryIndex,
  MalformedLine,
  CountMismatch,
  SpecTooLarge,
  Io,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rknn
