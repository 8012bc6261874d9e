// AArch64 variant: two double lanes per register, two registers per pack.
#include "rknn/simd.hpp"

#if defined(RKNN_HAVE_NEON)

#include <arm_neon.h>

namespace rknn::simd {

namespace {

std::uint32_t pack_hits_neon(const TrianglePack& pack, double x, double y) {
  const float64x2_t px = vdupq_n_f64(x);
  const float64x2_t py = vdupq_n_f64(y);
  const float64x2_t zero = vdupq_n_f64(0.0);
  std::uint32_t mask = 0;
  for (int half = 0; half < 2; ++half) {
    const int o = 2 * half;
    uint64x2_t inside = vdupq_n_u64(~std::uint64_t{0});
    for (int e = 0; e < 3; ++e) {
      const float64x2_t v = vmulq_f64(
          vld1q_f64(pack.sign[e] + o),
          vsubq_f64(vmulq_f64(vld1q_f64(pack.ex[e] + o), vsubq_f64(py, vld1q_f64(pack.oy[e] + o))),
                    vmulq_f64(vld1q_f64(pack.ey[e] + o), vsubq_f64(px, vld1q_f64(pack.ox[e] + o)))));
      const uint64x2_t on_edge = vandq_u64(vceqq_f64(v, zero), vld1q_u64(pack.closed[e] + o));
      inside = vandq_u64(inside, vorrq_u64(vcgtq_f64(v, zero), on_edge));
    }
    if (vgetq_lane_u64(inside, 0) != 0) mask |= 1u << o;
    if (vgetq_lane_u64(inside, 1) != 0) mask |= 1u << (o + 1);
  }
  return mask;
}

std::size_t count_closer_neon(double x, double y, double threshold, PointsSoA pts, std::size_t limit) {
  if (limit == 0) return 0;
  const std::size_t n = pts.x.size();
  const double* fx = pts.x.data();
  const double* fy = pts.y.data();
  const float64x2_t px = vdupq_n_f64(x);
  const float64x2_t py = vdupq_n_f64(y);
  const float64x2_t th = vdupq_n_f64(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t dx = vsubq_f64(px, vld1q_f64(fx + i));
    const float64x2_t dy = vsubq_f64(py, vld1q_f64(fy + i));
    const float64x2_t d2 = vaddq_f64(vmulq_f64(dx, dx), vmulq_f64(dy, dy));
    const uint64x2_t lt = vcltq_f64(d2, th);
    count += (vgetq_lane_u64(lt, 0) != 0) + (vgetq_lane_u64(lt, 1) != 0);
    if (count >= limit) return limit;
  }
  for (; i < n; ++i) {
    const double dx = x - fx[i];
    const double dy = y - fy[i];
    if (dx * dx + dy * dy < threshold && ++count >= limit) return limit;
  }
  return count;
}

}  // namespace

const KernelTable* neon_kernels() {
  static const KernelTable table{"neon", &pack_hits_neon, &count_closer_neon};
  return &table;
}

}  // namespace rknn::simd

#else

namespace rknn::simd {
const KernelTable* neon_kernels() { return nullptr; }
}  // namespace rknn::simd

#endif
