#include <cstdlib>
#include <string>

#include "rknn/simd.hpp"

namespace rknn::simd {

void TrianglePack::set(int lane, const Triangle2& t) {
  for (int e = 0; e < 3; ++e) {
    Point2 a = t.v[e];
    Point2 b = t.v[(e + 1) % 3];
    double s = 1.0;
    if (b.x < a.x || (b.x == a.x && b.y < a.y)) {
      std::swap(a, b);
      s = -1.0;
    }
    ox[e][lane] = a.x;
    oy[e][lane] = a.y;
    ex[e][lane] = b.x - a.x;
    ey[e][lane] = b.y - a.y;
    sign[e][lane] = s;
    closed[e][lane] = (t.inclusive >> e & 1u) ? ~std::uint64_t{0} : 0;
  }
  occluder[lane] = t.occluder;
}

namespace {

std::uint32_t pack_hits_scalar(const TrianglePack& pack, double x, double y) {
  std::uint32_t mask = 0;
  for (int lane = 0; lane < kLanes; ++lane) {
    bool inside = true;
    for (int e = 0; e < 3 && inside; ++e) {
      const double v = pack.sign[e][lane] *
                       (pack.ex[e][lane] * (y - pack.oy[e][lane]) - pack.ey[e][lane] * (x - pack.ox[e][lane]));
      inside = v > 0.0 || (v == 0.0 && pack.closed[e][lane] != 0);
    }
    if (inside) mask |= 1u << lane;
  }
  return mask;
}

std::size_t count_closer_scalar(double x, double y, double threshold, PointsSoA pts, std::size_t limit) {
  if (limit == 0) return 0;
  std::size_t count = 0;
  const std::size_t n = pts.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x - pts.x[i];
    const double dy = y - pts.y[i];
    if (dx * dx + dy * dy < threshold && ++count >= limit) return limit;
  }
  return count;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &pack_hits_scalar, &count_closer_scalar};
  return table;
}

const KernelTable* find_kernels(std::string_view name) {
  if (name == "scalar") return &scalar_kernels();
  if (name == "avx2") return avx2_kernels();
  if (name == "neon") return neon_kernels();
  if (name == "auto") {
    if (const auto* k = avx2_kernels()) return k;
    if (const auto* k = neon_kernels()) return k;
    return &scalar_kernels();
  }
  return nullptr;
}

const KernelTable& active_kernels() {
  static const KernelTable* chosen = [] {
    const char* env = std::getenv("RKNN_SIMD");
    if (env != nullptr && *env != '\0') {
      if (const auto* k = find_kernels(env)) return k;
    }
    return find_kernels("auto");
  }();
  return *chosen;
}

}  // namespace rknn::simd
