#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace equidist {

/// Worker count used when a caller passes 0: EQUIDIST_THREADS if set,
/// otherwise std::thread::hardware_concurrency().
int default_threads();

/// Runs fn(block) for block in [0, blocks) on up to `threads` workers.
/// Blocks are claimed dynamically but each writes only its own slot, so
/// callers that reduce slots in index order get thread-count-independent
/// results. The first exception thrown by any block is rethrown.
template <class Fn>
void parallel_blocks(std::size_t blocks, int threads, Fn&& fn) {
  if (threads <= 0) threads = default_threads();
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(threads), blocks);
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) fn(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        fn(b);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace equidist
