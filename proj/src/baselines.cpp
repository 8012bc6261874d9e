#include "rknn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rknn/engine.hpp"
#include "rknn/parallel.hpp"
#include "rknn/zone.hpp"

namespace rknn {

namespace {

void check_query(std::span<const Point2> facilities, std::size_t q_index, int k) {
  if (facilities.empty()) throw Error(ErrorKind::EmptyFacilitySet, "no facilities");
  if (q_index >= facilities.size()) throw Error(ErrorKind::InvalidQueryIndex, "query index out of range");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be at least 1");
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Relative slack on arc comparisons so rounding in the arc radii never filters
// or early-accepts a user whose exact distance test would disagree.
constexpr double kArcSlack = 1e-12;

}  // namespace

std::vector<std::uint32_t> closer_counts(std::span<const Point2> facilities, std::span<const Point2> users,
                                         std::size_t q_index, std::size_t limit, int workers,
                                         const simd::KernelTable* kernels) {
  if (facilities.empty()) throw Error(ErrorKind::EmptyFacilitySet, "no facilities");
  if (q_index >= facilities.size()) throw Error(ErrorKind::InvalidQueryIndex, "query index out of range");
  const auto& kern = kernels != nullptr ? *kernels : simd::active_kernels();
  std::vector<double> fx(facilities.size()), fy(facilities.size());
  for (std::size_t i = 0; i < facilities.size(); ++i) {
    fx[i] = facilities[i].x;
    fy[i] = facilities[i].y;
  }
  const Point2 q = facilities[q_index];
  std::vector<std::uint32_t> counts(users.size());
  parallel_for(users.size(), workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point2 u = users[i];
      // q itself (and any copy of q) ties at dist2(u, q) and is never counted.
      counts[i] = static_cast<std::uint32_t>(kern.count_closer(u.x, u.y, dist2(u, q), {fx, fy}, limit));
    }
  });
  return counts;
}

std::vector<std::uint32_t> oracle_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                       std::size_t q_index, int k, int workers, const simd::KernelTable* kernels) {
  check_query(facilities, q_index, k);
  const auto counts = closer_counts(facilities, users, q_index, static_cast<std::size_t>(k), workers, kernels);
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (counts[i] < static_cast<std::uint32_t>(k)) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

HitReport direct_count(std::span<const Occluder> occluders, Point2 u, int k) {
  int count = 0;
  for (const auto& o : occluders) {
    if (count >= k) break;
    if (point_in_occluder(o, u)) ++count;
  }
  return {count, count < k};
}

std::vector<std::uint32_t> infzone_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                        std::size_t q_index, int k) {
  check_query(facilities, q_index, k);
  const Rect domain = domain_rect(facilities, users, 0.001);
  const Selection sel = select_facilities(facilities, q_index, k, domain, ExactPruning{});
  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < users.size(); ++i) {
    if (sel.zone->contains(users[i])) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

Partition Partition::index(int i) {
  const double width = 360.0 / kSlicePartitions;
  return {i * width, (i + 1) * width};
}

namespace {

// Unit direction at `deg` degrees; multiples of 30 degrees are tabulated so
// axis directions have exactly zero components.
Point2 direction(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r == std::floor(r) && static_cast<int>(r) % 30 == 0) {
    constexpr double h = 0.86602540378443864676;  // sqrt(3) / 2
    static constexpr Point2 table[12] = {{1, 0},   {h, 0.5},   {0.5, h},   {0, 1},     {-0.5, h},   {-h, 0.5},
                                         {-1, 0}, {-h, -0.5}, {-0.5, -h}, {0, -1}, {0.5, -h}, {h, -0.5}};
    return table[static_cast<int>(r) / 30];
  }
  const double rad = r * std::numbers::pi / 180.0;
  return {std::cos(rad), std::sin(rad)};
}

// Distance from q along direction `deg` to the bisector of (f, q), d = f - q.
double ray_to_bisector(Point2 d, double deg) {
  const double proj = dot(d, direction(deg));
  return proj > 0.0 ? dot(d, d) / (2.0 * proj) : kInf;
}

bool angle_within(double phi_deg, double lo, double hi) {
  double rel = std::fmod(phi_deg - lo, 360.0);
  if (rel < 0.0) rel += 360.0;
  return rel <= hi - lo;
}

}  // namespace

Arcs slice_arcs(Point2 f, Point2 q, const Partition& partition) {
  if (f == q) throw Error(ErrorKind::CoincidentFacilities, "arcs of a facility coincident with q");
  const Point2 d = f - q;
  const double t_lo = ray_to_bisector(d, partition.lo);
  const double t_hi = ray_to_bisector(d, partition.hi);
  Arcs arcs{};
  arcs.upper = std::max(t_lo, t_hi);
  if (angle_within(std::atan2(d.y, d.x) * 180.0 / std::numbers::pi, partition.lo, partition.hi)) {
    arcs.lower = 0.5 * std::sqrt(dot(d, d));
  } else {
    arcs.lower = std::min(t_lo, t_hi);
  }
  return arcs;
}

int slice_partition_of(Point2 u, Point2 q) {
  double angle = std::atan2(u.y - q.y, u.x - q.x);
  if (angle < 0.0) angle += 2.0 * std::numbers::pi;
  const int i = static_cast<int>(angle / (2.0 * std::numbers::pi / kSlicePartitions));
  return std::clamp(i, 0, kSlicePartitions - 1);
}

std::array<SlicePartitionState, kSlicePartitions> slice_prepare(std::span<const Point2> facilities,
                                                                std::size_t q_index, int k) {
  check_query(facilities, q_index, k);
  const Point2 q = facilities[q_index];
  std::array<SlicePartitionState, kSlicePartitions> parts;
  std::vector<Arcs> arcs(facilities.size());
  std::vector<double> uppers;
  for (int p = 0; p < kSlicePartitions; ++p) {
    const Partition part = Partition::index(p);
    uppers.clear();
    for (std::size_t i = 0; i < facilities.size(); ++i) {
      if (i == q_index || facilities[i] == q) continue;
      arcs[i] = slice_arcs(facilities[i], q, part);
      if (std::isfinite(arcs[i].upper)) uppers.push_back(arcs[i].upper);
    }
    auto& st = parts[p];
    st.index = p;
    if (uppers.size() >= static_cast<std::size_t>(k)) {
      std::nth_element(uppers.begin(), uppers.begin() + (k - 1), uppers.end());
      st.bounding_arc = uppers[k - 1];
    } else {
      st.bounding_arc = kInf;
    }
    for (std::size_t i = 0; i < facilities.size(); ++i) {
      if (i == q_index || facilities[i] == q) continue;
      if (arcs[i].lower < st.bounding_arc) st.significant.emplace_back(arcs[i].lower, static_cast<std::uint32_t>(i));
    }
    std::sort(st.significant.begin(), st.significant.end());
  }
  return parts;
}

std::vector<std::uint32_t> slice_rknn(std::span<const Point2> facilities, std::span<const Point2> users,
                                      std::size_t q_index, int k, const SliceOptions& options) {
  const auto parts = slice_prepare(facilities, q_index, k);
  const Point2 q = facilities[q_index];
  std::vector<std::uint8_t> keep(users.size(), 0);

  parallel_for(users.size(), options.workers, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Point2 u = users[i];
      if (u == q) {
        keep[i] = 1;
        continue;
      }
      const auto& part = parts[slice_partition_of(u, q)];
      const double du = dist(u, q);
      if (du > part.bounding_arc * (1.0 + kArcSlack)) continue;  // filtered

      const double du2 = dist2(u, q);
      int pruned = 0;
      bool result = true;
      for (const auto& [lower, f] : part.significant) {
        if (options.early_accept && lower >= du * (1.0 + kArcSlack)) break;
        if (dist2(u, facilities[f]) < du2 && ++pruned >= k) {
          result = false;
          break;
        }
      }
      keep[i] = result ? 1 : 0;
    }
  });

  std::vector<std::uint32_t> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i]) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

}  // namespace rknn
