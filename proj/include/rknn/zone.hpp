#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <span>
#include <variant>
#include <vector>

#include "rknn/geometry.hpp"
#include "rknn/types.hpp"

namespace rknn {

struct ZonePiece {
  std::vector<Point2> polygon;  // convex, CCW
  int coverage = 0;             // in [0, k-1]
  Point2 box_min;
  Point2 box_max;

  double area() const;
  bool contains(Point2 p) const;  // closed
};

/// Influence zone kept as an arrangement of convex pieces, each tagged with the
/// number of accepted bisectors whose open invalid side covers it. Pieces whose
/// coverage reaches k are discarded, so the union of pieces is exactly the set
/// of points with fewer than k accepted competitors strictly closer than q.
class Zone {
 public:
  Zone(const Rect& domain, int k, Point2 q);

  /// Splits the zone by h if any piece reaches the open invalid side.
  /// `known_touching` skips the vertex scan (set when cheap_keep already holds).
  bool insert(std::uint32_t facility_id, const HalfPlane& h, bool known_touching = false);

  /// Some piece has a vertex strictly on the invalid side of h.
  bool touches(const HalfPlane& h) const;

  /// Sound skip: the bisector of f cannot reach the zone.
  bool cheap_prune(Point2 f) const;
  /// Sound keep: the bisector of f is guaranteed to cut into the zone.
  bool cheap_keep(Point2 f) const;

  bool contains(Point2 p) const;

  /// After freezing, the zone is only an outer bound and containment is refused.
  void freeze() { frozen_ = true; }
  bool frozen() const { return frozen_; }

  int k() const { return k_; }
  Point2 query() const { return q_; }
  const Rect& domain() const { return domain_; }
  const std::vector<ZonePiece>& pieces() const { return pieces_; }
  const std::vector<std::uint32_t>& accepted() const { return accepted_; }
  double total_area() const;
  std::size_t vertex_count() const;

  double max_vertex_distance() const { return max_vertex_dist_; }
  double min_boundary_distance() const { return min_boundary_dist_; }

 private:
  void refresh_bounds();

  Rect domain_;
  int k_;
  Point2 q_;
  std::vector<ZonePiece> pieces_;
  std::vector<std::uint32_t> accepted_;
  double max_vertex_dist_ = 0.0;
  double min_boundary_dist_ = 0.0;
  double sliver_area_ = 0.0;
  bool frozen_ = false;
};

struct ExactPruning {};
struct ConservativePruning {
  int exact_budget = 20;
};
struct NoPruning {};

using PruningStrategy = std::variant<ExactPruning, ConservativePruning, NoPruning>;

std::string to_string(const PruningStrategy& s);
/// Parses "exact", "none", "conservative" or "conservative:N".
PruningStrategy parse_strategy(const std::string& text);

struct Selection {
  std::vector<Occluder> occluders;  // processing order
  std::size_t coincident_skipped = 0;
  std::size_t examined = 0;
  std::size_t zone_pieces = 0;
  std::optional<Zone> zone;  // Exact and Conservative only
};

/// Orders facilities by distance to q and decides which occluders enter the scene.
Selection select_facilities(std::span<const Point2> facilities, std::size_t q_index, int k,
                            const Rect& domain, const PruningStrategy& strategy);

}  // namespace rknn
