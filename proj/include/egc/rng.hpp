#pragma once

// Deterministic random streams and chunked parallel execution.
//
// Work is split into fixed-size chunks; chunk k draws from its own stream
// derived from (master seed, tag, k). Results are merged in chunk order, so
// output never depends on the worker count.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <random>
#include <thread>
#include <vector>

namespace egc {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

struct RngConfig {
  std::uint64_t master_seed = 0x45474331323821ULL;
  int threads = 1;

  /// Engine for substream `index` of the analysis identified by `tag`.
  std::mt19937_64 stream(std::uint64_t tag, std::uint64_t index) const {
    return std::mt19937_64(splitmix64(splitmix64(master_seed ^ splitmix64(tag)) + index));
  }
};

/// Uniform integer in [0, bound) using rejection, independent of the
/// standard library's distribution implementation.
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  if (bound <= 1) return 0;
  const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

/// Runs body(chunk) for chunk in [0, chunks) on up to `threads` workers.
inline void parallel_chunks(std::size_t chunks, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(chunks, static_cast<std::size_t>(std::max(threads, 1)));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) body(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next++; c < chunks; c = next++) body(c);
    });
  }
}

}  // namespace egc
