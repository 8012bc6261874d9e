#include "rknn/scene.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <ostream>

namespace rknn {

Scene assemble_scene(std::span<const Occluder> occluders, const Rect& domain) {
  Scene s;
  s.domain = domain;
  s.occluder_count = occluders.size();
  s.origin_height = static_cast<double>(occluders.size() + 1);
  s.occluder_facility.reserve(occluders.size());
  for (std::size_t i = 0; i < occluders.size(); ++i) {
    const double z = static_cast<double>(i + 1);
    s.occluder_facility.push_back(occluders[i].facility_id);
    for (const auto& t : occluders[i].triangles) {
      Triangle3 t3{t, z};
      // Lanes carry the layer index so hits can be attributed without a lookup.
      t3.tri.occluder = static_cast<std::uint32_t>(i);
      s.triangles.push_back(t3);
    }
  }
  return s;
}

void Box3::expand(const Vec3& p) {
  min = {std::min(min.x, p.x), std::min(min.y, p.y), std::min(min.z, p.z)};
  max = {std::max(max.x, p.x), std::max(max.y, p.y), std::max(max.z, p.z)};
}

void Box3::expand(const Box3& b) {
  expand(b.min);
  expand(b.max);
}

bool Box3::contains(const Box3& b) const {
  return b.min.x >= min.x && b.min.y >= min.y && b.min.z >= min.z && b.max.x <= max.x &&
         b.max.y <= max.y && b.max.z <= max.z;
}

namespace {

Box3 empty_box() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {{inf, inf, inf}, {-inf, -inf, -inf}};
}

struct Builder {
  const Scene& scene;
  const BvhOptions& options;
  Bvh& bvh;
  std::vector<Box3> bounds;
  std::vector<Vec3> centroids;

  void make_leaf(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
    simd::TrianglePack pack;
    for (std::uint32_t i = begin; i < end; ++i) {
      pack.set(static_cast<int>(i - begin), scene.triangles[bvh.prim_indices[i]].tri);
    }
    pack.size = end - begin;
    bvh.nodes[node].first = begin;
    bvh.nodes[node].count = end - begin;
    bvh.nodes[node].pack = static_cast<std::uint32_t>(bvh.packs.size());
    bvh.packs.push_back(pack);
  }

  // Median splits halve the range, so depth stays below log2(n) + 1.
  void build(std::uint32_t node, std::uint32_t begin, std::uint32_t end) {
    Box3 box = empty_box();
    Box3 cbox = empty_box();
    for (std::uint32_t i = begin; i < end; ++i) {
      box.expand(bounds[bvh.prim_indices[i]]);
      cbox.expand(centroids[bvh.prim_indices[i]]);
    }
    bvh.nodes[node].box = box;

    const std::uint32_t n = end - begin;
    if (n <= options.leaf_size) {
      make_leaf(node, begin, end);
      return;
    }

    const double ext[3] = {cbox.max.x - cbox.min.x, cbox.max.y - cbox.min.y,
                           options.split_z ? cbox.max.z - cbox.min.z : 0.0};
    int axis = 0;
    if (ext[1] > ext[axis]) axis = 1;
    if (ext[2] > ext[axis]) axis = 2;

    const std::uint32_t mid = begin + n / 2;
    auto first = bvh.prim_indices.begin() + begin;
    if (ext[axis] > 0.0) {
      const auto key = [&](std::uint32_t i) {
        const Vec3& c = centroids[i];
        return axis == 0 ? c.x : axis == 1 ? c.y : c.z;
      };
      std::nth_element(first, bvh.prim_indices.begin() + mid, bvh.prim_indices.begin() + end,
                       [&](std::uint32_t a, std::uint32_t b) {
                         const double ka = key(a), kb = key(b);
                         return ka < kb || (ka == kb && a < b);
                       });
    }
    // Degenerate centroid bounds keep the current order: an even index split.

    const auto left = static_cast<std::uint32_t>(bvh.nodes.size());
    bvh.nodes.emplace_back();
    bvh.nodes.emplace_back();
    bvh.nodes[node].first = left;
    bvh.nodes[node].count = 0;
    build(left, begin, mid);
    build(left + 1, mid, end);
  }
};

}  // namespace

Box3 triangle_bounds(const Triangle3& t) {
  Box3 b = empty_box();
  for (int i = 0; i < 3; ++i) b.expand(t.vertex(i));
  return b;
}

Bvh build_bvh(const Scene& scene, const BvhOptions& options) {
  Bvh bvh;
  const std::size_t n = scene.triangles.size();
  if (n == 0) return bvh;
  if (options.leaf_size < 1 || options.leaf_size > simd::kLanes) {
    throw Error(ErrorKind::InvalidArgument, "leaf size must be in [1, 4]");
  }

  Builder b{scene, options, bvh, {}, {}};
  b.bounds.reserve(n);
  b.centroids.reserve(n);
  for (const auto& t : scene.triangles) {
    b.bounds.push_back(triangle_bounds(t));
    Vec3 c{0.0, 0.0, t.z};
    for (int i = 0; i < 3; ++i) {
      c.x += t.tri.v[i].x;
      c.y += t.tri.v[i].y;
    }
    c.x /= 3.0;
    c.y /= 3.0;
    b.centroids.push_back(c);
  }
  bvh.prim_indices.resize(n);
  std::iota(bvh.prim_indices.begin(), bvh.prim_indices.end(), 0u);
  bvh.nodes.reserve(2 * n);
  bvh.nodes.emplace_back();
  b.build(0, 0, static_cast<std::uint32_t>(n));
  return bvh;
}

int Bvh::depth() const {
  if (nodes.empty()) return 0;
  int best = 0;
  std::vector<std::pair<std::uint32_t, int>> stack{{0u, 1}};
  while (!stack.empty()) {
    const auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[i].is_leaf()) {
      stack.emplace_back(nodes[i].first, d + 1);
      stack.emplace_back(nodes[i].first + 1, d + 1);
    }
  }
  return best;
}

std::size_t Bvh::leaf_count() const { return packs.size(); }

std::vector<simd::TrianglePack> pack_triangles(const Scene& scene) {
  std::vector<simd::TrianglePack> packs((scene.triangles.size() + simd::kLanes - 1) / simd::kLanes);
  for (std::size_t i = 0; i < scene.triangles.size(); ++i) {
    auto& p = packs[i / simd::kLanes];
    p.set(static_cast<int>(i % simd::kLanes), scene.triangles[i].tri);
    p.size = static_cast<std::uint32_t>(i % simd::kLanes + 1);
  }
  return packs;
}

void dump_scene(std::ostream& out, const Scene& scene, const Bvh& bvh) {
  char line[512];
  for (const auto& t : scene.triangles) {
    const auto layer = static_cast<std::size_t>(t.z) - 1;
    std::snprintf(line, sizeof line, "tri %u %u %.17g %.17g %.17g %.17g %.17g %.17g %.17g\n",
                  scene.occluder_facility[layer], static_cast<unsigned>(t.tri.sub), t.z, t.tri.v[0].x,
                  t.tri.v[0].y, t.tri.v[1].x, t.tri.v[1].y, t.tri.v[2].x, t.tri.v[2].y);
    out << line;
  }
  for (std::size_t i = 0; i < bvh.nodes.size(); ++i) {
    const auto& b = bvh.nodes[i].box;
    std::snprintf(line, sizeof line, "box %zu %s %.17g %.17g %.17g %.17g %.17g %.17g\n", i,
                  bvh.nodes[i].is_leaf() ? "leaf" : "inner", b.min.x, b.min.y, b.min.z, b.max.x, b.max.y,
                  b.max.z);
    out << line;
  }
}

}  // namespace rknn
