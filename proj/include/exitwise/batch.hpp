#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "exitwise/rng.hpp"

namespace exitwise {

/// Worker count: hardware concurrency, capped by EXITWISE_THREADS when set to a positive integer.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("EXITWISE_THREADS")) {
    const long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, unsigned(cap));
  }
  return n;
}

/// Runs fn(i, rng_i) for i in [0, n) where rng_i = RngStream(seed, stream_base + i) and
/// returns the results in index order. Results do not depend on the worker count.
/// The first exception thrown by any call is rethrown after all workers stop.
template <class Fn>
auto sample_batch(std::size_t n, std::uint64_t seed, std::uint64_t stream_base, Fn&& fn, unsigned workers = 0)
    -> std::vector<decltype(fn(std::size_t{}, std::declval<RngStream&>()))> {
  using T = decltype(fn(std::size_t{}, std::declval<RngStream&>()));
  std::vector<T> out(n);
  if (workers == 0) workers = worker_count();
  constexpr std::size_t chunk = 1024;
  const std::size_t chunks = (n + chunk - 1) / chunk;
  workers = unsigned(std::min<std::size_t>(workers, std::max<std::size_t>(chunks, 1)));

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      const std::size_t end = std::min(n, (c + 1) * chunk);
      try {
        for (std::size_t i = c * chunk; i < end; ++i) {
          RngStream rng(seed, stream_base + i);
          out[i] = fn(i, rng);
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace exitwise
