#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace hetnetcov {

// Runs fn(i) for every i in [0, count) across a small thread pool.  Callers
// must write results into per-index storage: combined with per-index RNG
// substreams this makes every result independent of the thread count, so
// reproducibility never depends on scheduling.
inline void parallel_for_index(std::uint64_t count, unsigned threads,
                               const std::function<void(std::uint64_t)>& fn) {
  if (threads == 0) threads = std::thread::hardware_concurrency();
  if (threads <= 1 || count < 2) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto worker = [&]() {
    const std::uint64_t chunk = 16;
    for (;;) {
      const std::uint64_t begin = next.fetch_add(chunk);
      if (begin >= count) return;
      const std::uint64_t end = begin + chunk < count ? begin + chunk : count;
      for (std::uint64_t i = begin; i < end; ++i) fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace hetnetcov
