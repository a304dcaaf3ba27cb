#pragma once

#include <algorithm>
#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace pivlab {

/// 0 means "all hardware threads".
unsigned resolve_threads(unsigned requested) noexcept;

/// Runs body(begin, end) over contiguous slices of [0, count) on up to
/// `threads` workers and merges the per-slice tallies in slice order.
/// Tally must be default constructible and provide merge(const Tally&).
template <class Tally, class Body>
Tally parallel_tally(std::uint64_t count, unsigned threads, Body body) {
  const std::uint64_t workers =
      std::max<std::uint64_t>(1, std::min<std::uint64_t>(resolve_threads(threads), count));
  if (workers == 1) return body(std::uint64_t{0}, count);

  std::vector<Tally> parts(workers);
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::uint64_t w = 0; w < workers; ++w) {
    const std::uint64_t begin = count * w / workers;
    const std::uint64_t end = count * (w + 1) / workers;
    pool.emplace_back([&, w, begin, end] {
      try {
        parts[w] = body(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  Tally total = std::move(parts.front());
  for (std::uint64_t w = 1; w < workers; ++w) total.merge(parts[w]);
  return total;
}

}  // namespace pivlab
