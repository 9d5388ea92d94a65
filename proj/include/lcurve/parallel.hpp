#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <utility>

#ifdef LCURVE_HAVE_OPENMP
#include <omp.h>
#endif

namespace lcurve {

/// Selects the OpenMP kernel or its serial reference. Both produce identical
/// results; the serial path exists for testing and benchmarking.
enum class Execution { serial, parallel };

/// Runs body(i) for i in [0, n). Under Execution::parallel the iterations are
/// distributed over OpenMP threads, so body must only write to slot i of any
/// shared output. The first exception thrown by any iteration is rethrown
/// after the loop.
template <class Body>
void for_each_index(Execution policy, std::size_t n, Body&& body) {
#ifdef LCURVE_HAVE_OPENMP
  if (policy == Execution::parallel && n > 1) {
    std::exception_ptr failure;
    std::once_flag once;
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < count; ++i) {
      try {
        body(static_cast<std::size_t>(i));
      } catch (...) {
        std::call_once(once, [&] { failure = std::current_exception(); });
      }
    }
    if (failure) std::rethrow_exception(failure);
    return;
  }
#else
  (void)policy;
#endif
  for (std::size_t i = 0; i < n; ++i) body(i);
}

inline int max_threads() {
#ifdef LCURVE_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace lcurve
