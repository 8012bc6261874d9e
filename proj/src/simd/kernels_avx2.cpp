// Compiled with -mavx2 only; the dispatcher checks CPU support before use.
#include "rknn/simd.hpp"

#if defined(RKNN_HAVE_AVX2)

#include <immintrin.h>

#include <bit>

namespace rknn::simd {

namespace {

std::uint32_t pack_hits_avx2(const TrianglePack& pack, double x, double y) {
  const __m256d px = _mm256_set1_pd(x);
  const __m256d py = _mm256_set1_pd(y);
  const __m256d zero = _mm256_setzero_pd();
  __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
  for (int e = 0; e < 3; ++e) {
    const __m256d ox = _mm256_load_pd(pack.ox[e]);
    const __m256d oy = _mm256_load_pd(pack.oy[e]);
    const __m256d ex = _mm256_load_pd(pack.ex[e]);
    const __m256d ey = _mm256_load_pd(pack.ey[e]);
    const __m256d sg = _mm256_load_pd(pack.sign[e]);
    const __m256d closed = _mm256_castsi256_pd(
        _mm256_load_si256(reinterpret_cast<const __m256i*>(pack.closed[e])));
    const __m256d v = _mm256_mul_pd(
        sg, _mm256_sub_pd(_mm256_mul_pd(ex, _mm256_sub_pd(py, oy)), _mm256_mul_pd(ey, _mm256_sub_pd(px, ox))));
    const __m256d pos = _mm256_cmp_pd(v, zero, _CMP_GT_OQ);
    const __m256d on_edge = _mm256_and_pd(_mm256_cmp_pd(v, zero, _CMP_EQ_OQ), closed);
    inside = _mm256_and_pd(inside, _mm256_or_pd(pos, on_edge));
  }
  return static_cast<std::uint32_t>(_mm256_movemask_pd(inside));
}

std::size_t count_closer_avx2(double x, double y, double threshold, PointsSoA pts, std::size_t limit) {
  if (limit == 0) return 0;
  const std::size_t n = pts.x.size();
  const double* fx = pts.x.data();
  const double* fy = pts.y.data();
  const __m256d px = _mm256_set1_pd(x);
  const __m256d py = _mm256_set1_pd(y);
  const __m256d th = _mm256_set1_pd(threshold);
  std::size_t count = 0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d dx = _mm256_sub_pd(px, _mm256_loadu_pd(fx + i));
    const __m256d dy = _mm256_sub_pd(py, _mm256_loadu_pd(fy + i));
    const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
    count += static_cast<std::size_t>(std::popcount(
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_cmp_pd(d2, th, _CMP_LT_OQ)))));
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

const KernelTable* avx2_kernels() {
  static const KernelTable table{"avx2", &pack_hits_avx2, &count_closer_avx2};
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &table : nullptr;
}

}  // namespace rknn::simd

#else

namespace rknn::simd {
const KernelTable* avx2_kernels() { return nullptr; }
}  // namespace rknn::simd

#endif
