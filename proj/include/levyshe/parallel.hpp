#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace levyshe {

/// Runs body(workspace, index) for index in [0, count) on `workers` threads.
/// Each thread builds its own workspace with make_workspace(). Results must
/// be written to per-index slots so that output does not depend on the
/// schedule. The first exception thrown by any task is rethrown.
template <class MakeWorkspace, class Body>
void parallel_for(std::size_t count, unsigned workers,
                  MakeWorkspace make_workspace, Body body)
{
  workers = std::max(1u, std::min<unsigned>(workers, count ? count : 1));
  if (workers == 1) {
    auto ws = make_workspace();
    for (std::size_t i = 0; i < count; ++i)
      body(ws, i);
    return;
  }

  std::atomic<std::size_t> next{ 0 };
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      try {
        auto ws = make_workspace();
        for (std::size_t i = next++; i < count; i = next++)
          body(ws, i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure)
          failure = std::current_exception();
        next = count;
      }
    });
  }
  for (auto& t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

/// Replica blocks have a fixed size independent of the worker count, so
/// blockwise partial reductions combined in block order are reproducible.
inline constexpr std::size_t kReplicaBlock = 64;

inline std::size_t block_count(std::size_t items, std::size_t block = kReplicaBlock)
{
  return (items + block - 1) / block;
}

} // namespace levyshe
