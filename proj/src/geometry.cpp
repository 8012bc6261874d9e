#include "rknn/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace rknn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CoincidentFacilities: return "CoincidentFacilities";
    case ErrorKind::InvalidRect: return "InvalidRect";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::QueryOutsideDomain: return "QueryOutsideDomain";
    case ErrorKind::StaleZone: return "StaleZone";
    case ErrorKind::EmptyFacilitySet: return "EmptyFacilitySet";
    case ErrorKind::InvalidQueryIndex: return "InvalidQueryIndex";
    case ErrorKind::MalformedLine: return "MalformedLine";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::SpecTooLarge: return "SpecTooLarge";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Rect make_rect(Point2 min, Point2 max) {
  if (!is_finite(min) || !is_finite(max) || !(min.x < max.x) || !(min.y < max.y)) {
    throw Error(ErrorKind::InvalidRect, "rectangle must have finite corners and positive area");
  }
  return {min, max};
}

HalfPlane bisector(Point2 a, Point2 q) {
  if (a == q) {
    throw Error(ErrorKind::CoincidentFacilities, "bisector of coincident points");
  }
  HalfPlane h;
  h.n = a - q;
  h.c = 0.5 * ((a.x * a.x + a.y * a.y) - (q.x * q.x + q.y * q.y));
  return h;
}

Side side(const HalfPlane& h, Point2 p) {
  const double s = h.eval(p);
  if (s > 0.0) return Side::Invalid;
  if (s < 0.0) return Side::Valid;
  return Side::Boundary;
}

double distance_to_line(const HalfPlane& h, Point2 p) {
  return std::abs(h.eval(p)) / std::hypot(h.n.x, h.n.y);
}

namespace {

bool lex_less(Point2 a, Point2 b) { return a.x < b.x || (a.x == b.x && a.y < b.y); }

}  // namespace

double edge_function(Point2 a, Point2 b, Point2 p) {
  if (lex_less(b, a)) {
    return -((a.x - b.x) * (p.y - b.y) - (a.y - b.y) * (p.x - b.x));
  }
  return (b.x - a.x) * (p.y - a.y) - (b.y - a.y) * (p.x - a.x);
}

Triangle2 make_triangle(Point2 a, Point2 b, Point2 c, std::array<bool, 3> inclusive,
                        std::uint32_t occluder, std::uint8_t sub) {
  Triangle2 t;
  t.occluder = occluder;
  t.sub = sub;
  if (cross(b - a, c - a) >= 0.0) {
    t.v = {a, b, c};
  } else {
    // a,c,b: edges a->c (was c->a), c->b (was b->c), b->a (was a->b)
    t.v = {a, c, b};
    inclusive = {inclusive[2], inclusive[1], inclusive[0]};
  }
  for (int i = 0; i < 3; ++i) {
    if (inclusive[i]) t.inclusive |= static_cast<std::uint8_t>(1u << i);
  }
  return t;
}

bool triangle_contains(const Triangle2& t, Point2 p) {
  for (int i = 0; i < 3; ++i) {
    const double e = edge_function(t.v[i], t.v[(i + 1) % 3], p);
    if (e > 0.0) continue;
    if (e == 0.0 && (t.inclusive >> i & 1u)) continue;
    return false;
  }
  return true;
}

int occluder_claim_count(const Occluder& o, Point2 p) {
  int n = 0;
  for (const auto& t : o.triangles) n += triangle_contains(t, p) ? 1 : 0;
  return n;
}

bool point_in_occluder(const Occluder& o, Point2 p) {
  return std::any_of(o.triangles.begin(), o.triangles.end(),
                     [&](const Triangle2& t) { return triangle_contains(t, p); });
}

namespace {

struct LabeledVertex {
  Point2 p;
  bool bisector_edge;  // edge starting here lies on the clipping line
};

std::vector<LabeledVertex> clip_labeled(const Rect& r, const HalfPlane& h, bool keep_invalid) {
  const double sign = keep_invalid ? 1.0 : -1.0;
  std::array<Point2, 4> in;
  std::array<double, 4> s;
  for (int i = 0; i < 4; ++i) {
    in[i] = r.corner(i);
    s[i] = sign * h.eval(in[i]);
  }
  std::vector<LabeledVertex> out;
  for (int i = 0; i < 4; ++i) {
    const int j = (i + 1) % 4;
    const Point2 p = in[i];
    const Point2 q = in[j];
    // A kept corner starts a clip-line edge only when it lies on the line itself;
    // otherwise the next output vertex is reached along the domain edge.
    if (s[i] >= 0.0) out.push_back({p, s[i] == 0.0 && s[j] < 0.0});
    if ((s[i] > 0.0 && s[j] < 0.0) || (s[i] < 0.0 && s[j] > 0.0)) {
      const double t = s[i] / (s[i] - s[j]);
      out.push_back({p + t * (q - p), s[j] < 0.0});
    }
  }
  // Collapse repeated vertices (clip point landing on a corner).
  std::vector<LabeledVertex> dedup;
  for (const auto& v : out) {
    if (!dedup.empty() && dedup.back().p == v.p) {
      dedup.back().bisector_edge = v.bisector_edge;
      continue;
    }
    dedup.push_back(v);
  }
  while (dedup.size() > 1 && dedup.front().p == dedup.back().p) dedup.pop_back();
  return dedup;
}

}  // namespace

std::vector<Point2> clip_rect(const Rect& domain, const HalfPlane& h, bool keep_invalid) {
  std::vector<Point2> poly;
  for (const auto& v : clip_labeled(domain, h, keep_invalid)) poly.push_back(v.p);
  return poly;
}

std::optional<Occluder> build_occluder_clipped(const HalfPlane& h, const Rect& domain,
                                               std::uint32_t facility_id) {
  const auto poly = clip_labeled(domain, h, true);
  if (poly.size() < 3) return std::nullopt;
  Occluder o;
  o.facility_id = facility_id;
  o.halfplane = h;
  const std::size_t n = poly.size();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const auto sub = static_cast<std::uint8_t>(j - 1);
    // Polygon edges: domain edges closed, clipping-line edges open. Fan diagonals
    // are closed for the lower sub-index triangle only.
    const bool first = j == 1 ? !poly[0].bisector_edge : false;
    const bool middle = !poly[j].bisector_edge;
    const bool last = j + 1 == n - 1 ? !poly[n - 1].bisector_edge : true;
    o.triangles.push_back(
        make_triangle(poly[0].p, poly[j].p, poly[j + 1].p, {first, middle, last}, facility_id, sub));
  }
  return o;
}

std::optional<Occluder> build_occluder(Point2 a, Point2 q, const Rect& r,
                                       std::uint32_t facility_id) {
  const HalfPlane h = bisector(a, q);

  bool any_invalid = false;
  for (int i = 0; i < 4; ++i) any_invalid |= h.eval(r.corner(i)) > 0.0;
  if (!any_invalid) return std::nullopt;

  Occluder o;
  o.facility_id = facility_id;
  o.halfplane = h;

  if (a.x == q.x || a.y == q.y) {
    // Invalid region is a sub-rectangle: split along the v1-p2 diagonal.
    Point2 v1, v2, p1, p2;
    if (a.y == q.y) {
      const double m = 0.5 * (a.x + q.x);
      if (h.n.x > 0.0) {
        v1 = {r.max.x, r.min.y}; v2 = r.max; p1 = {m, r.min.y}; p2 = {m, r.max.y};
      } else {
        v1 = {r.min.x, r.max.y}; v2 = r.min; p1 = {m, r.max.y}; p2 = {m, r.min.y};
      }
    } else {
      const double m = 0.5 * (a.y + q.y);
      if (h.n.y > 0.0) {
        v1 = r.max; v2 = {r.min.x, r.max.y}; p1 = {r.max.x, m}; p2 = {r.min.x, m};
      } else {
        v1 = r.min; v2 = {r.max.x, r.min.y}; p1 = {r.min.x, m}; p2 = {r.max.x, m};
      }
    }
    o.triangles.push_back(make_triangle(v1, p1, p2, {true, false, true}, facility_id, 0));
    o.triangles.push_back(make_triangle(v1, v2, p2, {true, true, false}, facility_id, 1));
    return o;
  }

  // Corner maximizing n.v; unique because neither normal component is zero.
  const Point2 v{h.n.x > 0.0 ? r.max.x : r.min.x, h.n.y > 0.0 ? r.max.y : r.min.y};
  const Point2 p1{v.x, (h.c - h.n.x * v.x) / h.n.y};
  const Point2 p2{(h.c - h.n.y * v.y) / h.n.x, v.y};

  const double limit = 1e3 * r.diagonal();
  const Point2 center = r.center();
  if (!(dist(p1, center) <= limit) || !(dist(p2, center) <= limit)) {
    return build_occluder_clipped(h, r, facility_id);
  }
  o.triangles.push_back(make_triangle(v, p1, p2, {true, false, true}, facility_id, 0));
  return o;
}

}  // namespace rknn
