#pragma once

#include <cstddef>
#include <exception>
#include <limits>

#include <omp.h>

namespace mgower {

// Runs body(index, worker) for index in [0, n). Each index is independent and
// writes only its own output slot, so results do not depend on `workers`.
// If bodies throw, the exception from the lowest failing index is rethrown.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body) {
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i, 0u);
    return;
  }
  std::exception_ptr error;
  std::size_t error_index = std::numeric_limits<std::size_t>::max();
  const auto count = static_cast<long long>(n);
#pragma omp parallel for num_threads(static_cast<int>(workers)) schedule(dynamic, 4)
  for (long long idx = 0; idx < count; ++idx) {
    const auto i = static_cast<std::size_t>(idx);
    try {
      body(i, static_cast<unsigned>(omp_get_thread_num()));
    } catch (...) {
#pragma omp critical(mgower_parallel_error)
      {
        if (i < error_index) {
          error_index = i;
          error = std::current_exception();
        }
      }
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mgower
