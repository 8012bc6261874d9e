#pragma once

#include <cmath>
#include <vector>

#include "rknn/data.hpp"
#include "rknn/geometry.hpp"

namespace rknn::test {

inline Point2 random_point(Rng& rng, const Rect& r) {
  const double ux = rng.uniform();
  const double uy = rng.uniform();
  return {r.min.x + ux * r.width(), r.min.y + uy * r.height()};
}

inline std::vector<Point2> random_points(Rng& rng, const Rect& r, std::size_t n) {
  std::vector<Point2> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_point(rng, r));
  return out;
}

/// Within `band` of the bisector of (a, q), where rounding may flip a side test.
inline bool near_bisector(Point2 a, Point2 q, Point2 p, double band) {
  return std::abs(dist(p, a) - dist(p, q)) <= 2.0 * band;
}

/// Brute-force count of facilities (excluding index q) strictly closer to u than F[q].
inline int closer_count(const std::vector<Point2>& f, std::size_t q, Point2 u) {
  const double dq = dist2(u, f[q]);
  int c = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i != q && dist2(u, f[i]) < dq) ++c;
  }
  return c;
}

}  // namespace rknn::test
