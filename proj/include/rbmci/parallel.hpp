#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace rbmci {

/// Number of worker threads to use when the caller passes 0.
inline unsigned default_threads() noexcept {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

/// Runs body(i) for i in [0, n) over `threads` workers using a static
/// interleaved partition. Results are deterministic whenever body(i) writes
/// only to slots owned by i.
template <class Body>
void parallel_for(std::size_t n, unsigned threads, Body&& body) {
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(threads);
  for (unsigned w = 0; w < threads; ++w)
    workers.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += threads) body(i);
    });
}

}  // namespace rbmci
