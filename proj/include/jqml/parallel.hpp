#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace jqml {

/// Splits [0, n) into `partitions` contiguous ranges and runs `fn(begin, end,
/// partition)` on each, concurrently when partitions > 1. If several ranges
/// throw, the exception of the lowest range is rethrown.
inline void for_each_range(std::size_t n, std::size_t partitions,
                           const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
  if (partitions <= 1 || n < 2) {
    fn(0, n, 0);
    return;
  }
  if (partitions > n) partitions = n;
  std::vector<std::exception_ptr> errors(partitions);
  std::vector<std::thread> workers;
  workers.reserve(partitions);
  for (std::size_t p = 0; p < partitions; ++p) {
    std::size_t begin = n * p / partitions;
    std::size_t end = n * (p + 1) / partitions;
    workers.emplace_back([&, begin, end, p] {
      try {
        fn(begin, end, p);
      } catch (...) {
        errors[p] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (auto& error : errors) {
    if (error) std::rethrow_exception(error);
  }
}

}  // namespace jqml
