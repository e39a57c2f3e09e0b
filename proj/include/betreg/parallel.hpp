#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace betreg {

// Worker count: the request (or hardware concurrency when 0 = auto), capped
// by BETTING_THREADS when that is set to a positive value.
inline int resolve_threads(int requested = 0) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::thread::hardware_concurrency());
  }
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("BETTING_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0 && cap < n) n = cap;
  }
  return n;
}

// Runs fn(i) for i in [0, count). Each index writes only its own slot of any
// shared output, so results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  pool.reserve(n);
  for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

}  // namespace betreg
