#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace heatbayes {

// Worker count from HEATBAYES_THREADS (0 or unset = hardware concurrency).
inline unsigned worker_count() {
  unsigned n = 0;
  if (const char* env = std::getenv("HEATBAYES_THREADS")) n = static_cast<unsigned>(std::strtoul(env, nullptr, 10));
  if (n == 0) n = std::max(1u, std::thread::hardware_concurrency());
  return n;
}

// Calls body(i) for i in [0, count). Each index is handled exactly once, so
// results written to slot i do not depend on scheduling. The first exception
// thrown by any worker is rethrown.
template <class Body>
void parallel_for(std::size_t count, Body&& body) {
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace heatbayes
