#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "rknn/scene.hpp"
#include "rknn/simd.hpp"

namespace rknn {

/// Vertical ray r(t) = origin + t * (0, 0, -1), t in [0, t_max].
struct Ray {
  Vec3 origin;
  Vec3 direction{0.0, 0.0, -1.0};
  double t_max = 0.0;

  static Ray for_user(Point2 u, const Scene& scene) {
    return {{u.x, u.y, scene.origin_height}, {0.0, 0.0, -1.0}, scene.origin_height};
  }
};

struct HitReport {
  int count = 0;  // distinct occluders hit, clipped at the budget
  bool is_rknn = true;
};

/// Generic Moller-Trumbore solve of r(t) = (1-a-b) v0 + a v1 + b v2 with the
/// occluder edge rule applied to the barycentric boundaries. Returns t on hit.
std::optional<double> intersect_ray_triangle(const Ray& r, const Triangle3& t);

/// Vertical-ray form: 2D point-in-triangle at the triangle's height.
std::optional<double> intersect_vertical(const Ray& r, const Triangle3& t);

struct CastOptions {
  bool early_termination = true;
  bool use_bvh = true;
  /// Test hook: terminate this many hits early (0 = correct behavior).
  int fault_budget_offset = 0;
  const simd::KernelTable* kernels = nullptr;  // nullptr = active_kernels()
};

/// Traversal context bundling the scene with its BVH and linear packs.
struct CastTarget {
  const Scene* scene = nullptr;
  const Bvh* bvh = nullptr;
  const std::vector<simd::TrianglePack>* linear = nullptr;  // required when use_bvh == false
};

/// Counts distinct occluders over u, stopping at `budget` hits. is_rknn uses k.
HitReport count_hits(const CastTarget& target, Point2 u, int k, const CastOptions& options = {});

/// Raw clipped hit counts with an explicit budget, one per user.
std::vector<std::uint32_t> cast_counts(const CastTarget& target, std::span<const Point2> users, int budget,
                                       int workers, const CastOptions& options = {});

/// mask[i] == count_hits(users[i]).is_rknn; identical for every worker count.
std::vector<std::uint8_t> cast_all(const CastTarget& target, std::span<const Point2> users, int k, int workers,
                                   const CastOptions& options = {});

}  // namespace rknn
