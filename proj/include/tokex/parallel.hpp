#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tokex {

// Worker count from TOKEX_THREADS, falling back to hardware concurrency.
unsigned default_threads();

// Number of shards parallel_shards uses for n items.
inline unsigned shard_count(std::size_t n, unsigned threads) {
  const auto cap = static_cast<unsigned>(std::min<std::size_t>(std::max<std::size_t>(n, 1), 1024));
  return std::max(1u, std::min(threads, cap));
}

// Runs `fn(shard, begin, end)` over `threads` contiguous shards of [0, n).
// Shard boundaries depend only on (n, threads), so callers that combine
// per-shard results in shard order stay deterministic. The first exception
// thrown by any shard is rethrown.
template <typename Fn>
void parallel_shards(std::size_t n, unsigned threads, Fn&& fn) {
  threads = shard_count(n, threads);
  if (threads == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t begin = n * t / threads;
    const std::size_t end = n * (t + 1) / threads;
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(static_cast<std::size_t>(t), begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace tokex
