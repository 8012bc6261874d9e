#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rknn/raycast.hpp"
#include "rknn/scene.hpp"
#include "rknn/zone.hpp"

namespace rknn {

struct QueryConfig {
  int k = 1;
  PruningStrategy strategy = ExactPruning{};
  int workers = 1;
  double margin_fraction = 0.001;
  CastOptions cast;
  BvhOptions bvh;
};

struct StageTimings {
  double occluder_build_ms = 0.0;
  double bvh_build_ms = 0.0;
  double raycast_ms = 0.0;
  double total_ms = 0.0;
};

struct QueryResult {
  std::vector<std::uint32_t> result_user_ids;  // ascending
  std::size_t occluders_accepted = 0;
  StageTimings timings;
};

/// Bounding box of F and U grown by margin_fraction of the extent on each side.
/// A zero-extent axis is widened to max(1, other extent) around the data.
Rect domain_rect(std::span<const Point2> facilities, std::span<const Point2> users, double margin_fraction);

/// Everything built for one query facility before any ray is cast.
struct PreparedScene {
  Rect domain;
  Selection selection;
  Scene scene;
  Bvh bvh;
  std::vector<simd::TrianglePack> linear;

  CastTarget target() const { return {&scene, &bvh, &linear}; }
};

PreparedScene prepare_scene(std::span<const Point2> facilities, std::size_t q_index, int k, const Rect& domain,
                            const PruningStrategy& strategy, const BvhOptions& bvh_options = {});

/// Bichromatic RkNN: users with fewer than k facilities strictly closer than F[q_index].
QueryResult rknn_query(std::span<const Point2> facilities, std::span<const Point2> users, std::size_t q_index,
                       const QueryConfig& cfg);

/// Monochromatic RkNN over a single point set; result ids index into `points`.
QueryResult mono_rknn_query(std::span<const Point2> points, std::size_t q_index, const QueryConfig& cfg);

}  // namespace rknn
