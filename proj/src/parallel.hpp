#pragma once

#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace wolfsearch::detail {

//! Runs fn(i) for i in [0, n) on up to `threads` workers. Work is split in
//! fixed strided slots; the first exception by index is rethrown.
template<class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn)
{
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  {
    std::vector<std::jthread> workers;
    const std::size_t count = std::min(threads, n);
    for (std::size_t w = 0; w < count; ++w) {
      workers.emplace_back([&, w] {
        for (std::size_t i = w; i < n; i += count) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e)
      std::rethrow_exception(e);
  }
}

} // namespace wolfsearch::detail
