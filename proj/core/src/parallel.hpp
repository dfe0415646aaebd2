#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace fsnet::detail {

/// Runs body(begin, end, worker) over contiguous static chunks of [0, n).
/// Chunk boundaries depend only on n and the worker count.
template <typename Body>
void parallel_chunks(std::int64_t n, unsigned workers, Body&& body) {
  const auto count = static_cast<std::int64_t>(std::max(1u, workers));
  if (count == 1 || n < 2) {
    body(std::int64_t{0}, n, 0u);
    return;
  }
  const auto chunks = std::min(count, n);
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(chunks));
  threads.reserve(static_cast<std::size_t>(chunks));
  for (std::int64_t w = 0; w < chunks; ++w) {
    const auto begin = n * w / chunks;
    const auto end = n * (w + 1) / chunks;
    threads.emplace_back([&, begin, end, w] {
      try {
        body(begin, end, static_cast<unsigned>(w));
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace fsnet::detail
