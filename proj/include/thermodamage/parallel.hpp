#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace thermodamage {

namespace detail {
inline std::atomic<int>& thread_setting() {
  static std::atomic<int> n{0};  // 0: not set, read the environment
  return n;
}
}  // namespace detail

/// Worker count for cell loops. THERMODAMAGE_NUM_THREADS sets the default.
inline int num_threads() {
  int n = detail::thread_setting().load();
  if (n > 0) return n;
  if (const char* env = std::getenv("THERMODAMAGE_NUM_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

inline void set_num_threads(int n) { detail::thread_setting().store(std::max(1, n)); }

/// Runs fn(chunk, begin, end) over contiguous chunks of [0, n). Chunk k always
/// covers the same range for a given thread count, so per-chunk buffers merged
/// in chunk order give reproducible results.
template <class Fn>
void parallel_chunks(std::size_t n, int chunks, Fn&& fn) {
  chunks = std::max(1, std::min<int>(chunks, static_cast<int>(std::max<std::size_t>(n, 1))));
  if (chunks == 1) {
    fn(0, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(chunks));
  for (int k = 0; k < chunks; ++k) {
    const std::size_t b = n * static_cast<std::size_t>(k) / static_cast<std::size_t>(chunks);
    const std::size_t e = n * static_cast<std::size_t>(k + 1) / static_cast<std::size_t>(chunks);
    pool.emplace_back([&fn, k, b, e] { fn(k, b, e); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace thermodamage
