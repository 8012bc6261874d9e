#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rknn {

/// Splits [0, n) into `workers` contiguous chunks and runs fn(begin, end) on
/// each, one thread per chunk. Chunk boundaries depend only on (n, workers).
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  const std::size_t w = std::clamp<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), 1, std::max<std::size_t>(n, 1));
  if (w == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  std::vector<std::jthread> threads;
  threads.reserve(w - 1);
  const std::size_t chunk = n / w;
  const std::size_t extra = n % w;
  std::size_t begin = 0;
  std::size_t first_end = 0;
  for (std::size_t i = 0; i < w; ++i) {
    const std::size_t end = begin + chunk + (i < extra ? 1 : 0);
    if (i == 0) {
      first_end = end;
    } else {
      threads.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    begin = end;
  }
  fn(std::size_t{0}, first_end);
}

/// Worker count from RKNN_THREADS, else hardware concurrency.
int default_workers();

}  // namespace rknn
