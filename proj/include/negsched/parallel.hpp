#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

// Deterministic parallel helpers.  Work is cut into fixed chunks whose
// results are stored per chunk and reduced in chunk order, so outputs are
// bit-identical for every thread count.

namespace negsched {

// Runs fn(index) for index in [0, count) on up to `threads` workers.  Each
// index is processed exactly once; writes must go to per-index slots.
template <typename Fn>
void parallel_for(std::int64_t count, int threads, Fn&& fn) {
  if (threads <= 1 || count <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    while (true) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) break;
      fn(i);
    }
  };
  const int n_workers = static_cast<int>(std::min<std::int64_t>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline constexpr std::int64_t kTrialChunk = 1024;

// Partitions [0, trials) into fixed chunks of kTrialChunk and calls
// fn(chunk_index, begin, end) once per chunk, possibly in parallel.  The
// chunk boundaries do not depend on the thread count.
template <typename Fn>
void for_each_trial_chunk(std::int64_t trials, int threads, Fn&& fn) {
  const std::int64_t n_chunks = (trials + kTrialChunk - 1) / kTrialChunk;
  parallel_for(n_chunks, threads, [&](std::int64_t c) {
    const std::int64_t begin = c * kTrialChunk;
    const std::int64_t end = std::min(begin + kTrialChunk, trials);
    fn(c, begin, end);
  });
}

inline std::int64_t trial_chunk_count(std::int64_t trials) {
  return (trials + kTrialChunk - 1) / kTrialChunk;
}

}  // namespace negsched
