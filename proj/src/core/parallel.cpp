#include "gsaudio/core/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace gsaudio::core {
namespace {

std::atomic<unsigned>& configured() {
  static std::atomic<unsigned> threads{std::max(1u, std::thread::hardware_concurrency())};
  return threads;
}

}  // namespace

unsigned thread_count() noexcept { return configured().load(); }

void set_thread_count(unsigned threads) noexcept { configured().store(std::max(1u, threads)); }

void parallel_for(std::size_t n, std::size_t min_chunk,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  min_chunk = std::max<std::size_t>(1, min_chunk);
  const std::size_t max_tasks = (n + min_chunk - 1) / min_chunk;
  const std::size_t tasks = std::min<std::size_t>(thread_count(), max_tasks);
  if (tasks <= 1) {
    body(0, n);
    return;
  }
  const std::size_t chunk = (n + tasks - 1) / tasks;
  // Worker exceptions are carried back and the lowest-ranged one rethrown.
  std::vector<std::exception_ptr> errors(tasks);
  {
    std::vector<std::jthread> workers;
    workers.reserve(tasks - 1);
    for (std::size_t t = 1; t < tasks; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      workers.emplace_back([&body, &errors, t, begin, end] {
        try {
          body(begin, end);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      });
    }
    try {
      body(0, std::min(n, chunk));
    } catch (...) {
      errors[0] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace gsaudio::core
