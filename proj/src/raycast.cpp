#include "rknn/raycast.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <cstdlib>
#include <string>

#include "rknn/parallel.hpp"

namespace rknn {

int default_workers() {
  if (const char* env = std::getenv("RKNN_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
double dot3(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
Vec3 cross3(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

bool closed_edge(const Triangle3& t, int e) { return (t.tri.inclusive >> e & 1u) != 0; }

}  // namespace

std::optional<double> intersect_ray_triangle(const Ray& r, const Triangle3& tri) {
  const Vec3 v0 = tri.vertex(0);
  const Vec3 e1 = sub(tri.vertex(1), v0);
  const Vec3 e2 = sub(tri.vertex(2), v0);
  const Vec3 pvec = cross3(r.direction, e2);
  const double det = dot3(e1, pvec);
  if (det == 0.0) return std::nullopt;

  const Vec3 tvec = sub(r.origin, v0);
  const double a = dot3(tvec, pvec) / det;
  const Vec3 qvec = cross3(tvec, e1);
  const double b = dot3(r.direction, qvec) / det;
  const double ab = a + b;

  // b == 0 is edge v0v1, a + b == 1 is edge v1v2, a == 0 is edge v2v0.
  const bool ok_a = a > 0.0 || (a == 0.0 && closed_edge(tri, 2));
  const bool ok_b = b > 0.0 || (b == 0.0 && closed_edge(tri, 0));
  const bool ok_ab = ab < 1.0 || (ab == 1.0 && closed_edge(tri, 1));
  if (!(ok_a && ok_b && ok_ab)) return std::nullopt;

  const double t = dot3(e2, qvec) / det;
  if (t < 0.0 || t > r.t_max) return std::nullopt;
  return t;
}

std::optional<double> intersect_vertical(const Ray& r, const Triangle3& tri) {
  const double t = r.origin.z - tri.z;
  if (t < 0.0 || t > r.t_max) return std::nullopt;
  if (!triangle_contains(tri.tri, {r.origin.x, r.origin.y})) return std::nullopt;
  return t;
}

namespace {

bool box_hit_vertical(const Box3& b, double x, double y, double z_lo, double z_hi) {
  return x >= b.min.x && x <= b.max.x && y >= b.min.y && y <= b.max.y && b.max.z >= z_lo && b.min.z <= z_hi;
}

// Hits counted up to `budget`; the half-open edge rule guarantees each
// occluder claims a point at most once, so a lane hit is a distinct occluder.
int traverse(const CastTarget& target, Point2 u, int budget, const CastOptions& options) {
  if (budget <= 0) return 0;
  const auto& kern = options.kernels != nullptr ? *options.kernels : simd::active_kernels();
  int count = 0;

  if (!options.use_bvh) {
    for (const auto& pack : *target.linear) {
      count += std::popcount(kern.pack_hits(pack, u.x, u.y));
      if (count >= budget) return budget;
    }
    return count;
  }

  const Bvh& bvh = *target.bvh;
  if (bvh.empty()) return 0;
  const double z_hi = target.scene->origin_height;
  const double z_lo = 0.0;

  std::uint32_t stack[Bvh::kMaxDepth];
  int sp = 0;
  stack[sp++] = 0;
  while (sp > 0) {
    const BvhNode& node = bvh.nodes[stack[--sp]];
    if (!box_hit_vertical(node.box, u.x, u.y, z_lo, z_hi)) continue;
    if (node.is_leaf()) {
      count += std::popcount(kern.pack_hits(bvh.packs[node.pack], u.x, u.y));
      if (count >= budget) return budget;
    } else {
      stack[sp++] = node.first + 1;
      stack[sp++] = node.first;
    }
  }
  return count;
}

}  // namespace

HitReport count_hits(const CastTarget& target, Point2 u, int k, const CastOptions& options) {
  const int budget = options.early_termination ? k - options.fault_budget_offset : INT_MAX;
  const int c = traverse(target, u, budget, options);
  // A ray stopped by its budget is reported as rejected.
  if (c >= budget) return {k, false};
  return {std::min(c, k), c < k};
}

std::vector<std::uint32_t> cast_counts(const CastTarget& target, std::span<const Point2> users, int budget,
                                       int workers, const CastOptions& options) {
  std::vector<std::uint32_t> counts(users.size());
  const int b = options.early_termination ? budget - options.fault_budget_offset : INT_MAX;
  parallel_for(users.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const int c = traverse(target, users[i], b, options);
      counts[i] = static_cast<std::uint32_t>(c >= b ? budget : std::min(c, budget));
    }
  });
  return counts;
}

std::vector<std::uint8_t> cast_all(const CastTarget& target, std::span<const Point2> users, int k, int workers,
                                   const CastOptions& options) {
  std::vector<std::uint8_t> mask(users.size());
  parallel_for(users.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) mask[i] = count_hits(target, users[i], k, options).is_rknn ? 1 : 0;
  });
  return mask;
}

}  // namespace rknn
