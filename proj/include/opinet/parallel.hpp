#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <thread>
#include <vector>

namespace opinet {

// Items are split into fixed-size chunks so chunk boundaries, and therefore
// everything a chunk computes, are independent of the worker count.
inline constexpr std::size_t kParallelChunk = 256;

inline std::size_t chunk_count(std::size_t items) {
  return (items + kParallelChunk - 1) / kParallelChunk;
}

// Runs fn(begin, end, chunk_index) over [0, items). Workers claim whole
// chunks through a shared counter; each index is visited exactly once, so
// callers that write only per-index or per-chunk slots get identical results
// for any worker count. fn must not throw. workers <= 1 runs inline.
template <class Fn>
void parallel_for(std::size_t items, std::uint32_t workers, Fn&& fn) {
  if (items == 0) {
    return;
  }
  const std::size_t chunks = chunk_count(items);
  if (workers <= 1 || chunks == 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      const std::size_t begin = c * kParallelChunk;
      fn(begin, std::min(begin + kParallelChunk, items), c);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1, std::memory_order_relaxed);
      if (c >= chunks) {
        return;
      }
      const std::size_t begin = c * kParallelChunk;
      fn(begin, std::min(begin + kParallelChunk, items), c);
    }
  };
  const std::size_t spawn = std::min<std::size_t>(workers, chunks);
  std::vector<std::thread> pool;
  pool.reserve(spawn - 1);
  for (std::size_t w = 1; w < spawn; ++w) {
    pool.emplace_back(drain);
  }
  drain();
  for (auto& t : pool) {
    t.join();
  }
}

}  // namespace opinet
