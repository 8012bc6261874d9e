#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rknn/types.hpp"

namespace rknn {

/// Half-plane { p : n.p > c }. For the bisector of (a, q) the open side is
/// exactly the set of points strictly closer to a than to q.
struct HalfPlane {
  Point2 n;
  double c = 0.0;

  double eval(Point2 p) const { return n.x * p.x + n.y * p.y - c; }
};

enum class Side { Invalid, Boundary, Valid };

HalfPlane bisector(Point2 a, Point2 q);
Side side(const HalfPlane& h, Point2 p);

/// Signed area test with a canonical vertex order: edge_function(a, b, p) ==
/// -edge_function(b, a, p) holds bit-exactly, so two triangles sharing an edge
/// always see a point on that edge with opposite (or both zero) signs.
double edge_function(Point2 a, Point2 b, Point2 p);

/// Counter-clockwise triangle. Bit i of `inclusive` marks edge v[i] -> v[i+1]
/// as closed; points exactly on an open edge are outside.
struct Triangle2 {
  std::array<Point2, 3> v;
  std::uint8_t inclusive = 0;
  std::uint32_t occluder = 0;
  std::uint8_t sub = 0;

  double signed_area() const { return 0.5 * cross(v[1] - v[0], v[2] - v[0]); }
};

/// Builds a CCW triangle from arbitrary winding; `inclusive` is given per edge
/// in input order (a->b, b->c, c->a) and permuted along with the vertices.
Triangle2 make_triangle(Point2 a, Point2 b, Point2 c, std::array<bool, 3> inclusive,
                        std::uint32_t occluder, std::uint8_t sub);

bool triangle_contains(const Triangle2& t, Point2 p);

struct Occluder {
  std::uint32_t facility_id = 0;
  std::vector<Triangle2> triangles;  // 1..3
  HalfPlane halfplane;
};

/// Covering triangles for R intersected with the open invalid side of the
/// bisector of (a, q). Returns nullopt when no corner of R is strictly invalid.
std::optional<Occluder> build_occluder(Point2 a, Point2 q, const Rect& domain,
                                       std::uint32_t facility_id = 0);

/// Exact triangulation of R intersected with the closed invalid side (at most
/// 3 triangles). Used as the fallback for near-axis-aligned bisectors.
std::optional<Occluder> build_occluder_clipped(const HalfPlane& h, const Rect& domain,
                                               std::uint32_t facility_id = 0);

bool point_in_occluder(const Occluder& o, Point2 p);

/// Number of triangles of `o` that claim p; 0 or 1 for well-formed occluders.
int occluder_claim_count(const Occluder& o, Point2 p);

/// Distance from p to the line n.x = c.
double distance_to_line(const HalfPlane& h, Point2 p);

/// Convex polygon (CCW) of R intersected with { eval(p) >= 0 } or { <= 0 }.
std::vector<Point2> clip_rect(const Rect& domain, const HalfPlane& h, bool keep_invalid);

Rect make_rect(Point2 min, Point2 max);

}  // namespace rknn
