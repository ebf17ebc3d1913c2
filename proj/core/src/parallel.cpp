#include "graspbridge/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace graspbridge {
namespace {

std::atomic<long> g_override{-1};
// Nested parallel_for calls from a worker run inline.
thread_local bool t_in_worker = false;

std::size_t from_environment() {
  const char* env = std::getenv("GRASPBRIDGE_THREADS");
  if (env == nullptr || *env == '\0') {
    return std::max<unsigned>(1, std::thread::hardware_concurrency());
  }
  try {
    long v = std::stol(env);
    return v <= 0 ? 0 : static_cast<std::size_t>(v);
  } catch (const std::exception&) {
    return 0;
  }
}

}  // namespace

std::size_t worker_count() {
  long o = g_override.load();
  if (o >= 0) return static_cast<std::size_t>(o);
  static const std::size_t env = from_environment();
  return env;
}

void set_worker_count(std::size_t n) { g_override.store(static_cast<long>(n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::size_t workers = t_in_worker ? 1 : std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> threads;
  threads.reserve(workers);
  std::size_t block = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * block;
    std::size_t end = std::min(n, begin + block);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      t_in_worker = true;
      try {
        for (std::size_t i = begin; i < end; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace graspbridge
