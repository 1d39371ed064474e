#ifndef SCMA_PARALLEL_HPP
#define SCMA_PARALLEL_HPP

#include <algorithm>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace scma {

/// Resolve a requested worker count: values <= 0 mean "use the hardware".
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(chunk_index, begin, end) over [0, n) split into contiguous chunks.
/// Chunk boundaries depend only on n and the chunk count, so any reduction
/// that is associative and commutative over chunks is thread-count invariant.
inline void parallel_chunks(
    std::uint64_t n, int threads,
    const std::function<void(int, std::uint64_t, std::uint64_t)>& fn) {
  if (n == 0) return;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(resolve_threads(threads), n));
  if (workers <= 1) {
    fn(0, 0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    const std::uint64_t begin = n * w / workers;
    const std::uint64_t end = n * (w + 1) / workers;
    pool.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace scma

#endif
