#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "rknn/geometry.hpp"

namespace rknn::simd {

inline constexpr int kLanes = 4;

/// Up to four triangles in structure-of-arrays form, one lane per triangle.
/// Each edge is stored from its canonical (lexicographically smaller) endpoint
/// with a +-1 sign, matching edge_function() bit for bit. Unused lanes have
/// zero edges and no closed edges, so they never report a hit.
struct alignas(32) TrianglePack {
  double ox[3][kLanes] = {};
  double oy[3][kLanes] = {};
  double ex[3][kLanes] = {};
  double ey[3][kLanes] = {};
  double sign[3][kLanes] = {};
  std::uint64_t closed[3][kLanes] = {};  // all-ones when the edge is closed
  std::uint32_t occluder[kLanes] = {};
  std::uint32_t size = 0;

  void set(int lane, const Triangle2& t);
};

/// Facility coordinates in SoA form for distance counting.
struct PointsSoA {
  std::span<const double> x;
  std::span<const double> y;
};

struct KernelTable {
  std::string_view name;
  /// Bit i set iff lane i's triangle contains (x, y) under the closed/open edge rule.
  std::uint32_t (*pack_hits)(const TrianglePack& pack, double x, double y);
  /// min(limit, #{ i : dist2(p, pts[i]) < threshold }).
  std::size_t (*count_closer)(double x, double y, double threshold, PointsSoA pts, std::size_t limit);
};

const KernelTable& scalar_kernels();
/// nullptr when the variant was not compiled in or the CPU lacks support.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

/// Kernel table picked at first use: the widest supported variant unless the
/// RKNN_SIMD environment variable names one of "scalar", "avx2", "neon".
const KernelTable& active_kernels();

/// Looks up a variant by name ("auto" resolves like active_kernels()).
const KernelTable* find_kernels(std::string_view name);

}  // namespace rknn::simd
