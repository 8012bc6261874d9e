#include <doctest.h>

#include <vector>

#include "rknn/simd.hpp"
#include "support.hpp"

using namespace rknn;

namespace {

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> out{&simd::scalar_kernels()};
  if (const auto* k = simd::avx2_kernels()) out.push_back(k);
  if (const auto* k = simd::neon_kernels()) out.push_back(k);
  return out;
}

std::uint32_t reference_mask(const std::vector<Triangle2>& tris, Point2 p) {
  std::uint32_t m = 0;
  for (std::size_t i = 0; i < tris.size(); ++i) {
    if (triangle_contains(tris[i], p)) m |= 1u << i;
  }
  return m;
}

}  // namespace

TEST_CASE("kernel lookup") {
  CHECK(simd::find_kernels("scalar") == &simd::scalar_kernels());
  CHECK(simd::find_kernels("bogus") == nullptr);
  CHECK(simd::find_kernels("auto") != nullptr);
  MESSAGE("active kernels: " << simd::active_kernels().name);
}

TEST_CASE("pack_hits matches triangle_contains for every variant") {
  Rng rng(1);
  const Rect r{{-5, -5}, {5, 5}};
  for (const auto* kern : variants()) {
    CAPTURE(kern->name);
    for (int trial = 0; trial < 5000; ++trial) {
      const std::size_t n = 1 + rng.below(4);
      std::vector<Triangle2> tris;
      simd::TrianglePack pack;
      // Snap to a coarse grid so vertices, edges and query points coincide often.
      const auto snap = [&] {
        return Point2{static_cast<double>(rng.below(9)) - 4.0, static_cast<double>(rng.below(9)) - 4.0};
      };
      while (tris.size() < n) {
        const std::array<bool, 3> flags{rng.below(2) == 1, rng.below(2) == 1, rng.below(2) == 1};
        const Triangle2 t = make_triangle(snap(), snap(), snap(), flags, 0, 0);
        if (t.signed_area() == 0.0) continue;
        pack.set(static_cast<int>(tris.size()), t);
        tris.push_back(t);
      }
      pack.size = static_cast<std::uint32_t>(n);
      for (int j = 0; j < 20; ++j) {
        const Point2 p = j % 2 == 0 ? snap() : test::random_point(rng, r);
        REQUIRE(kern->pack_hits(pack, p.x, p.y) == reference_mask(tris, p));
      }
    }
  }
}

TEST_CASE("empty lanes never hit") {
  simd::TrianglePack pack;
  for (const auto* kern : variants()) {
    CHECK(kern->pack_hits(pack, 0.0, 0.0) == 0u);
    CHECK(kern->pack_hits(pack, 1.0, -3.0) == 0u);
  }
}

TEST_CASE("count_closer variants agree with scalar") {
  Rng rng(2);
  const Rect r{{0, 0}, {100, 100}};
  for (const std::size_t n : {0u, 1u, 3u, 4u, 5u, 17u, 250u}) {
    auto pts = test::random_points(rng, r, n);
    // Integer duplicates create exact distance ties.
    for (std::size_t i = 0; i + 1 < pts.size(); i += 3) pts[i] = {std::floor(pts[i].x), std::floor(pts[i].y)};
    std::vector<double> xs, ys;
    for (const auto& p : pts) {
      xs.push_back(p.x);
      ys.push_back(p.y);
    }
    for (int j = 0; j < 500; ++j) {
      const Point2 u = j % 3 == 0 ? Point2{std::floor(rng.uniform() * 100), std::floor(rng.uniform() * 100)}
                                  : test::random_point(rng, r);
      const double th = pts.empty() ? 100.0 : dist2(u, pts[rng.below(pts.size())]);
      for (const std::size_t limit : {0u, 1u, 3u, 1000u}) {
        const auto want = simd::scalar_kernels().count_closer(u.x, u.y, th, {xs, ys}, limit);
        std::size_t brute = 0;
        for (const auto& p : pts) brute += dist2(u, p) < th ? 1 : 0;
        REQUIRE(want == std::min(brute, limit));
        for (const auto* kern : variants()) REQUIRE(kern->count_closer(u.x, u.y, th, {xs, ys}, limit) == want);
      }
    }
  }
}
