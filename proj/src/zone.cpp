#include "rknn/zone.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace rknn {

namespace {

double polygon_area(const std::vector<Point2>& poly) {
  double a = 0.0;
  for (std::size_t i = 0, n = poly.size(); i < n; ++i) {
    a += cross(poly[i], poly[(i + 1) % n]);
  }
  return 0.5 * a;
}

// Part of a convex polygon on one side of h (closed). Vertex values are passed
// in so both halves of a split reuse the same intersection points.
std::vector<Point2> clip_convex(const std::vector<Point2>& poly, const std::vector<double>& s,
                                bool keep_invalid) {
  const double sign = keep_invalid ? 1.0 : -1.0;
  std::vector<Point2> out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = (i + 1) % n;
    const double si = sign * s[i];
    const double sj = sign * s[j];
    if (si >= 0.0) out.push_back(poly[i]);
    if ((si > 0.0 && sj < 0.0) || (si < 0.0 && sj > 0.0)) {
      // Evaluate from the invalid-side endpoint so both halves get the same point.
      const bool from_i = s[i] > 0.0;
      const Point2 p = from_i ? poly[i] : poly[j];
      const Point2 q = from_i ? poly[j] : poly[i];
      const double sp = from_i ? s[i] : s[j];
      const double sq = from_i ? s[j] : s[i];
      const double t = sp / (sp - sq);
      out.push_back(p + t * (q - p));
    }
  }
  std::vector<Point2> dedup;
  for (const auto& p : out) {
    if (dedup.empty() || !(dedup.back() == p)) dedup.push_back(p);
  }
  while (dedup.size() > 1 && dedup.front() == dedup.back()) dedup.pop_back();
  return dedup;
}

ZonePiece make_piece(std::vector<Point2> poly, int coverage) {
  ZonePiece piece;
  piece.polygon = std::move(poly);
  piece.coverage = coverage;
  piece.box_min = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  piece.box_max = {-piece.box_min.x, -piece.box_min.y};
  for (const auto& p : piece.polygon) {
    piece.box_min = {std::min(piece.box_min.x, p.x), std::min(piece.box_min.y, p.y)};
    piece.box_max = {std::max(piece.box_max.x, p.x), std::max(piece.box_max.y, p.y)};
  }
  return piece;
}

double point_segment_distance(Point2 p, Point2 a, Point2 b) {
  const Point2 ab = b - a;
  const double len2 = dot(ab, ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return dist(p, a + t * ab);
}

}  // namespace

double ZonePiece::area() const { return polygon_area(polygon); }

bool ZonePiece::contains(Point2 p) const {
  if (p.x < box_min.x || p.x > box_max.x || p.y < box_min.y || p.y > box_max.y) return false;
  for (std::size_t i = 0, n = polygon.size(); i < n; ++i) {
    if (edge_function(polygon[i], polygon[(i + 1) % n], p) < 0.0) return false;
  }
  return true;
}

Zone::Zone(const Rect& domain, int k, Point2 q) : domain_(domain), k_(k), q_(q) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (!domain.contains(q)) throw Error(ErrorKind::QueryOutsideDomain, "query facility lies outside the domain");
  pieces_.push_back(make_piece({domain.corner(0), domain.corner(1), domain.corner(2), domain.corner(3)}, 0));
  sliver_area_ = 1e-15 * domain.area();
  refresh_bounds();
}

bool Zone::touches(const HalfPlane& h) const {
  for (const auto& piece : pieces_) {
    for (const auto& v : piece.polygon) {
      if (h.eval(v) > 0.0) return true;
    }
  }
  return false;
}

bool Zone::insert(std::uint32_t facility_id, const HalfPlane& h, bool known_touching) {
  if (frozen_) throw Error(ErrorKind::StaleZone, "insert into a frozen zone");
  if (!known_touching && !touches(h)) return false;

  std::vector<ZonePiece> next;
  next.reserve(pieces_.size() * 2);
  std::vector<double> s;
  for (auto& piece : pieces_) {
    s.resize(piece.polygon.size());
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < s.size(); ++i) {
      s[i] = h.eval(piece.polygon[i]);
      lo = std::min(lo, s[i]);
      hi = std::max(hi, s[i]);
    }
    bool whole_valid = hi <= 0.0;
    bool whole_invalid = !whole_valid && lo >= 0.0;
    std::vector<Point2> valid_part, invalid_part;
    if (!whole_valid && !whole_invalid) {
      valid_part = clip_convex(piece.polygon, s, false);
      invalid_part = clip_convex(piece.polygon, s, true);
      if (invalid_part.size() < 3 || polygon_area(invalid_part) <= sliver_area_) {
        whole_valid = true;
      } else if (valid_part.size() < 3 || polygon_area(valid_part) <= sliver_area_) {
        whole_invalid = true;
      }
    }
    if (whole_valid) {
      next.push_back(std::move(piece));
    } else if (whole_invalid) {
      if (piece.coverage + 1 < k_) {
        piece.coverage += 1;
        next.push_back(std::move(piece));
      }
    } else {
      next.push_back(make_piece(std::move(valid_part), piece.coverage));
      if (piece.coverage + 1 < k_) next.push_back(make_piece(std::move(invalid_part), piece.coverage + 1));
    }
  }
  pieces_ = std::move(next);
  accepted_.push_back(facility_id);
  refresh_bounds();
  return true;
}

void Zone::refresh_bounds() {
  double max_d = 0.0;
  double min_d = std::numeric_limits<double>::infinity();
  for (const auto& piece : pieces_) {
    const std::size_t n = piece.polygon.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2 a = piece.polygon[i];
      max_d = std::max(max_d, dist(a, q_));
      min_d = std::min(min_d, point_segment_distance(q_, a, piece.polygon[(i + 1) % n]));
    }
  }
  max_vertex_dist_ = max_d;
  min_boundary_dist_ = pieces_.empty() ? 0.0 : min_d;
}

bool Zone::cheap_prune(Point2 f) const { return dist(f, q_) > 2.0 * max_vertex_dist_; }

bool Zone::cheap_keep(Point2 f) const { return dist(f, q_) < 2.0 * min_boundary_dist_; }

bool Zone::contains(Point2 p) const {
  if (frozen_) throw Error(ErrorKind::StaleZone, "containment query on a frozen zone");
  return std::any_of(pieces_.begin(), pieces_.end(), [&](const ZonePiece& piece) { return piece.contains(p); });
}

double Zone::total_area() const {
  double a = 0.0;
  for (const auto& piece : pieces_) a += piece.area();
  return a;
}

std::size_t Zone::vertex_count() const {
  std::size_t n = 0;
  for (const auto& piece : pieces_) n += piece.polygon.size();
  return n;
}

std::string to_string(const PruningStrategy& s) {
  if (std::holds_alternative<ExactPruning>(s)) return "exact";
  if (std::holds_alternative<NoPruning>(s)) return "none";
  return "conservative:" + std::to_string(std::get<ConservativePruning>(s).exact_budget);
}

PruningStrategy parse_strategy(const std::string& text) {
  if (text == "exact") return ExactPruning{};
  if (text == "none") return NoPruning{};
  if (text == "conservative") return ConservativePruning{};
  const std::string prefix = "conservative:";
  if (text.rfind(prefix, 0) == 0) {
    std::size_t used = 0;
    int budget = -1;
    try {
      budget = std::stoi(text.substr(prefix.size()), &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == text.size() - prefix.size() && budget >= 0) return ConservativePruning{budget};
  }
  throw Error(ErrorKind::InvalidArgument, "unknown pruning strategy '" + text + "'");
}

Selection select_facilities(std::span<const Point2> facilities, std::size_t q_index, int k,
                            const Rect& domain, const PruningStrategy& strategy) {
  if (facilities.empty()) throw Error(ErrorKind::EmptyFacilitySet, "no facilities");
  if (q_index >= facilities.size()) throw Error(ErrorKind::InvalidQueryIndex, "query index out of range");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");

  const Point2 q = facilities[q_index];
  std::vector<std::uint32_t> order;
  order.reserve(facilities.size());
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    if (i != q_index) order.push_back(static_cast<std::uint32_t>(i));
  }
  std::vector<double> d2(facilities.size());
  for (auto i : order) d2[i] = dist2(facilities[i], q);
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    return d2[a] < d2[b] || (d2[a] == d2[b] && a < b);
  });

  Selection sel;
  const auto add_occluder = [&](std::uint32_t idx) {
    if (auto occ = build_occluder(facilities[idx], q, domain, idx)) sel.occluders.push_back(std::move(*occ));
  };

  const bool none = std::holds_alternative<NoPruning>(strategy);
  const int budget = std::holds_alternative<ConservativePruning>(strategy)
                         ? std::get<ConservativePruning>(strategy).exact_budget
                         : std::numeric_limits<int>::max();
  if (!none) {
    sel.zone.emplace(domain, k, q);
    if (budget == 0) sel.zone->freeze();
  }

  for (const auto idx : order) {
    const Point2 f = facilities[idx];
    if (f == q) {
      ++sel.coincident_skipped;
      continue;
    }
    ++sel.examined;
    if (none) {
      add_occluder(idx);
      continue;
    }
    Zone& zone = *sel.zone;
    // Facilities arrive in increasing distance and the zone only shrinks, so
    // once one is prunable every later one is too.
    if (zone.cheap_prune(f)) {
      sel.examined -= 1;
      break;
    }
    if (zone.frozen()) {
      add_occluder(idx);
      continue;
    }
    if (zone.insert(idx, bisector(f, q), zone.cheap_keep(f))) {
      add_occluder(idx);
      if (static_cast<int>(zone.accepted().size()) >= budget) zone.freeze();
    }
  }
  if (sel.zone) sel.zone_pieces = sel.zone->pieces().size();
  return sel;
}

}  // namespace rknn
