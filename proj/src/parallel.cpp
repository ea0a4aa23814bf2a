#include "smolv/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace smolv {

namespace {
std::atomic<bool> g_deterministic{true};
constexpr std::size_t kFixedChunks = 16;
}  // namespace

int thread_count() {
  if (const char* env = std::getenv("SMOLV_NUM_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_deterministic(bool on) { g_deterministic = on; }
bool deterministic() { return g_deterministic; }

std::size_t reduction_chunks(std::size_t n) {
  const std::size_t want =
      deterministic() ? kFixedChunks : static_cast<std::size_t>(thread_count());
  return std::max<std::size_t>(1, std::min(want, n));
}

void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
  if (chunks == 0) return;
  auto bounds = [&](std::size_t c) { return std::pair{n * c / chunks, n * (c + 1) / chunks}; };
  const std::size_t workers =
      std::min<std::size_t>(chunks, static_cast<std::size_t>(thread_count()));
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) {
      auto [b, e] = bounds(c);
      body(c, b, e);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t c = next++; c < chunks; c = next++) {
          auto [b, e] = bounds(c);
          body(c, b, e);
        }
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace smolv
