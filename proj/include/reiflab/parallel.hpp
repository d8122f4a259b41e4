#pragma once

#include <cstddef>
#include <exception>
#include <span>

namespace reiflab {

/// Number of worker threads used by parallel loops (defaults to hardware).
void set_thread_count(int n);
int thread_count();

/// Runs body(i) for i in [0, n). Iterations must be independent. The first
/// exception thrown by any iteration is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
  std::exception_ptr failure;
#if defined(_OPENMP)
#pragma omp parallel for schedule(static) num_threads(thread_count())
#endif
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
#if defined(_OPENMP)
#pragma omp critical(reiflab_parallel_failure)
#endif
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
}

/// Dot product whose rounding does not depend on the thread count: partial
/// sums over fixed-size blocks are combined in block order.
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace reiflab
