#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rinx {

namespace detail {
inline std::atomic<unsigned>& thread_setting() {
  static std::atomic<unsigned> value{0};
  return value;
}
}  // namespace detail

// 0 means "use hardware concurrency".
inline void set_thread_count(unsigned n) { detail::thread_setting().store(n); }

inline unsigned thread_count() {
  const unsigned n = detail::thread_setting().load();
  if (n != 0) return n;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(block_begin, block_end, block_index) over [0, n) split into blocks of
// fixed size. Block boundaries depend only on n and block_size, never on the
// thread count, so callers that reduce per block and then combine blocks in
// index order get bit-identical results for any number of threads.
template <typename Fn>
void parallel_blocks(std::size_t n, std::size_t block_size, Fn&& fn) {
  if (n == 0) return;
  block_size = std::max<std::size_t>(1, block_size);
  const std::size_t blocks = (n + block_size - 1) / block_size;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_count(), blocks));
  auto run = [&](std::size_t b) {
    const std::size_t begin = b * block_size;
    fn(begin, std::min(n, begin + block_size), b);
  };
  if (workers <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) run(b);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
        try {
          run(b);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  parallel_blocks(n, 64, [&](std::size_t begin, std::size_t end, std::size_t) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
  });
}

}  // namespace rinx
