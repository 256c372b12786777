#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace tsptw {

// Runs fn(i) for i in [0, count). Work items must write to disjoint slots;
// ordering across items is unspecified.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t thread_count =
      std::min<std::size_t>(static_cast<std::size_t>(workers), count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(thread_count);
  for (std::size_t t = 0; t < thread_count; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace tsptw
