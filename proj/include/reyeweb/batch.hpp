#pragma once

#include <exception>
#include <vector>

#ifdef REYEWEB_HAVE_OPENMP
#include <omp.h>
#endif

namespace reyeweb {

/// Execution policy for the batch kernels. Serial is the reference
/// implementation; Parallel must produce bit-identical results, which every
/// kernel guarantees by seeding work items from (base seed, item index) and
/// writing into index-addressed slots.
enum class Exec { Serial, Parallel };

inline int max_threads() {
#ifdef REYEWEB_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

inline void set_threads(int n) {
#ifdef REYEWEB_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

/// Evaluate f(0..n-1) into a vector, optionally across threads. Exceptions
/// from work items are captured and rethrown on the calling thread (first one
/// in item order wins).
template <class T, class F>
std::vector<T> parallel_map(int n, Exec exec, F&& f) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
#ifdef REYEWEB_HAVE_OPENMP
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
      try {
        out[i] = f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (int i = 0; i < n; ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);
    return out;
  }
#else
  (void)exec;
#endif
  for (int i = 0; i < n; ++i) out[i] = f(i);
  return out;
}

}  // namespace reyeweb
