#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "rknn/geometry.hpp"
#include "rknn/raycast.hpp"
#include "rknn/simd.hpp"

namespace rknn {

/// Brute force: users with fewer than k facilities strictly closer than F[q_index].
std::vector<std::uint32_t> oracle_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                       std::size_t q_index, int k, int workers = 1,
                                       const simd::KernelTable* kernels = nullptr);

/// Exact per-user count of facilities strictly closer than F[q_index], clipped at `limit`.
std::vector<std::uint32_t> closer_counts(std::span<const Point2> facilities, std::span<const Point2> users,
                                         std::size_t q_index, std::size_t limit, int workers = 1,
                                         const simd::KernelTable* kernels = nullptr);

/// Linear scan over occluders using point_in_occluder.
HitReport direct_count(std::span<const Occluder> occluders, Point2 u, int k);

/// Builds the exact influence zone and reports the users it contains.
std::vector<std::uint32_t> infzone_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                        std::size_t q_index, int k);

inline constexpr int kSlicePartitions = 12;

/// Angular sector [lo, hi) around q, in degrees from the positive x axis.
struct Partition {
  double lo = 0.0;
  double hi = 0.0;

  static Partition index(int i);
};

struct Arcs {
  double lower;
  double upper;
};

/// Distances from q to f's bisector along the sector: the minimum over the
/// sector (lower) and the maximum over its two radial boundaries (upper).
Arcs slice_arcs(Point2 f, Point2 q, const Partition& partition);

struct SlicePartitionState {
  int index = 0;
  double bounding_arc = 0.0;                     // may be +inf
  std::vector<std::pair<double, std::uint32_t>> significant;  // (lower arc, facility), ascending
};

std::array<SlicePartitionState, kSlicePartitions> slice_prepare(std::span<const Point2> facilities,
                                                                std::size_t q_index, int k);

int slice_partition_of(Point2 u, Point2 q);

struct SliceOptions {
  bool early_accept = true;  // stop at the first lower arc >= dist(u, q)
  int workers = 1;
};

std::vector<std::uint32_t> slice_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                      std::size_t q_index, int k, const SliceOptions& options = {});

}  // namespace rknn
