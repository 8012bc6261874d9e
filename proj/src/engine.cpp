#include "rknn/engine.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace rknn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void validate(std::span<const Point2> facilities, std::size_t q_index, const QueryConfig& cfg) {
  if (facilities.empty()) throw Error(ErrorKind::EmptyFacilitySet, "no facilities");
  if (q_index >= facilities.size()) throw Error(ErrorKind::InvalidQueryIndex, "query index out of range");
  if (cfg.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
  if (cfg.workers < 1) throw Error(ErrorKind::InvalidArgument, "workers must be at least 1");
}

}  // namespace

Rect domain_rect(std::span<const Point2> facilities, std::span<const Point2> users, double margin_fraction) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Point2 lo{inf, inf};
  Point2 hi{-inf, -inf};
  for (auto pts : {facilities, users}) {
    for (const auto& p : pts) {
      lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
      hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
  }
  if (lo.x > hi.x) throw Error(ErrorKind::InvalidArgument, "domain of an empty point set");

  const double w = hi.x - lo.x;
  const double h = hi.y - lo.y;
  Rect r{lo, hi};
  if (w > 0.0) {
    r.min.x -= margin_fraction * w;
    r.max.x += margin_fraction * w;
  } else {
    const double half = 0.5 * std::max(1.0, h);
    r.min.x = lo.x - half;
    r.max.x = lo.x + half;
  }
  if (h > 0.0) {
    r.min.y -= margin_fraction * h;
    r.max.y += margin_fraction * h;
  } else {
    const double half = 0.5 * std::max(1.0, w);
    r.min.y = lo.y - half;
    r.max.y = lo.y + half;
  }
  return r;
}

PreparedScene prepare_scene(std::span<const Point2> facilities, std::size_t q_index, int k, const Rect& domain,
                            const PruningStrategy& strategy, const BvhOptions& bvh_options) {
  PreparedScene p;
  p.domain = domain;
  p.selection = select_facilities(facilities, q_index, k, domain, strategy);
  p.scene = assemble_scene(p.selection.occluders, domain);
  p.bvh = build_bvh(p.scene, bvh_options);
  p.linear = pack_triangles(p.scene);
  return p;
}

QueryResult rknn_query(std::span<const Point2> facilities, std::span<const Point2> users, std::size_t q_index,
                       const QueryConfig& cfg) {
  validate(facilities, q_index, cfg);
  const auto t_total = Clock::now();
  QueryResult result;

  const Rect domain = domain_rect(facilities, users, cfg.margin_fraction);

  auto t0 = Clock::now();
  Selection sel = select_facilities(facilities, q_index, cfg.k, domain, cfg.strategy);
  Scene scene = assemble_scene(sel.occluders, domain);
  result.timings.occluder_build_ms = ms_since(t0);
  result.occluders_accepted = scene.occluder_count;

  t0 = Clock::now();
  const Bvh bvh = cfg.cast.use_bvh ? build_bvh(scene, cfg.bvh) : Bvh{};
  const auto linear = cfg.cast.use_bvh ? std::vector<simd::TrianglePack>{} : pack_triangles(scene);
  result.timings.bvh_build_ms = ms_since(t0);

  t0 = Clock::now();
  const auto mask = cast_all({&scene, &bvh, &linear}, users, cfg.k, cfg.workers, cfg.cast);
  result.timings.raycast_ms = ms_since(t0);

  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i]) result.result_user_ids.push_back(static_cast<std::uint32_t>(i));
  }
  result.timings.total_ms = ms_since(t_total);
  return result;
}

QueryResult mono_rknn_query(std::span<const Point2> points, std::size_t q_index, const QueryConfig& cfg) {
  if (points.size() < 2) throw Error(ErrorKind::InvalidArgument, "monochromatic query needs at least two points");
  validate(points, q_index, cfg);
  const auto t_total = Clock::now();
  QueryResult result;

  std::vector<Point2> users;
  std::vector<std::uint32_t> user_ids;
  users.reserve(points.size() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (i == q_index) continue;
    users.push_back(points[i]);
    user_ids.push_back(static_cast<std::uint32_t>(i));
  }
  const Rect domain = domain_rect(points, {}, cfg.margin_fraction);

  // Every user sits inside its own occluder, so pruning and the hit budget
  // both run one level deeper and the own hit is subtracted afterwards.
  const int budget = cfg.k + 1;
  auto t0 = Clock::now();
  Selection sel = select_facilities(points, q_index, budget, domain, cfg.strategy);
  Scene scene = assemble_scene(sel.occluders, domain);
  result.timings.occluder_build_ms = ms_since(t0);
  result.occluders_accepted = scene.occluder_count;

  std::vector<std::uint8_t> own(points.size(), 0);
  for (const auto& o : sel.occluders) own[o.facility_id] = 1;

  t0 = Clock::now();
  const Bvh bvh = cfg.cast.use_bvh ? build_bvh(scene, cfg.bvh) : Bvh{};
  const auto linear = cfg.cast.use_bvh ? std::vector<simd::TrianglePack>{} : pack_triangles(scene);
  result.timings.bvh_build_ms = ms_since(t0);

  t0 = Clock::now();
  const auto counts = cast_counts({&scene, &bvh, &linear}, users, budget, cfg.workers, cfg.cast);
  result.timings.raycast_ms = ms_since(t0);

  for (std::size_t j = 0; j < users.size(); ++j) {
    const std::uint32_t id = user_ids[j];
    const std::uint32_t c = counts[j] - (own[id] && counts[j] > 0 ? 1u : 0u);
    if (c < static_cast<std::uint32_t>(cfg.k)) result.result_user_ids.push_back(id);
  }
  result.timings.total_ms = ms_since(t_total);
  return result;
}

}  // namespace rknn
