#include "dgs/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dgs {

namespace {

std::atomic<std::size_t> g_threads{1};
std::atomic<std::size_t> g_budget{std::size_t{768} << 20};

}  // namespace

void set_thread_count(std::size_t threads) { g_threads = std::max<std::size_t>(1, threads); }

std::size_t thread_count() { return g_threads; }

void set_sketch_memory_budget(std::size_t bytes) { g_budget = std::max<std::size_t>(1, bytes); }

std::size_t sketch_memory_budget() { return g_budget; }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(thread_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mu;
  auto body = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mu);
        if (!error) error = std::current_exception();
        next = count;
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace dgs
