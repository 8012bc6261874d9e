#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "rknn/geometry.hpp"
#include "rknn/simd.hpp"

namespace rknn {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct Triangle3 {
  Triangle2 tri;   // xy footprint with edge rules
  double z = 0.0;  // shared height of all three vertices

  Vec3 vertex(int i) const { return {tri.v[i].x, tri.v[i].y, z}; }
};

/// Occluders lifted to horizontal layers: occluder i (1-based, in selection
/// order) sits at z = i and rays start at origin_height = count + 1.
struct Scene {
  std::vector<Triangle3> triangles;
  std::vector<std::uint32_t> occluder_facility;  // layer - 1 -> facility id
  std::size_t occluder_count = 0;
  double origin_height = 1.0;
  Rect domain;
};

Scene assemble_scene(std::span<const Occluder> occluders, const Rect& domain);

struct Box3 {
  Vec3 min;
  Vec3 max;

  void expand(const Vec3& p);
  void expand(const Box3& b);
  bool contains(const Box3& b) const;
};

Box3 triangle_bounds(const Triangle3& t);

struct BvhNode {
  Box3 box;
  std::uint32_t first = 0;  // leaf: first slot in prim_indices; inner: left child (right = first + 1)
  std::uint32_t count = 0;  // > 0 for leaves
  std::uint32_t pack = 0;   // leaf: index into packs

  bool is_leaf() const { return count > 0; }
};

struct BvhOptions {
  std::uint32_t leaf_size = 4;  // 1..4, one SIMD pack per leaf
  /// Allow splits along z. Vertical rays span every layer, so z splits never
  /// cull a subtree; by default only x and y compete for the longest axis.
  bool split_z = false;
};

class Bvh {
 public:
  static constexpr int kMaxDepth = 64;

  std::vector<BvhNode> nodes;  // nodes[0] is the root when non-empty
  std::vector<std::uint32_t> prim_indices;
  std::vector<simd::TrianglePack> packs;

  bool empty() const { return nodes.empty(); }
  int depth() const;
  std::size_t leaf_count() const;
};

/// Recursive median split of triangle centroids along the longest axis of the
/// centroid bounds. Equal centroids fall back to an even index split.
Bvh build_bvh(const Scene& scene, const BvhOptions& options = {});

/// Linear SoA packs over all triangles in scene order (the BVH-free scan path).
std::vector<simd::TrianglePack> pack_triangles(const Scene& scene);

/// One primitive per line: "tri <facility> <sub> <z> x0 y0 x1 y1 x2 y2" and
/// "box <node> <leaf|inner> minx miny minz maxx maxy maxz".
void dump_scene(std::ostream& out, const Scene& scene, const Bvh& bvh);

}  // namespace rknn
