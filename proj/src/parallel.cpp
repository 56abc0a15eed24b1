#include "dynrmt/parallel.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <atomic>
#include <exception>
#include <mutex>

namespace dynrmt {

namespace {
std::atomic<int> g_max_threads{0};
}

void set_max_threads(int n) { g_max_threads.store(n < 0 ? 0 : n); }

int max_threads() {
  int n = g_max_threads.load();
#ifdef _OPENMP
  if (n == 0) n = omp_get_max_threads();
#else
  if (n == 0) n = 1;
#endif
  return n;
}

namespace detail {

void run_indexed(ExecPolicy policy, std::int64_t n, void* ctx,
                 void (*body)(void*, std::int64_t)) {
#ifdef _OPENMP
  if (policy == ExecPolicy::parallel && max_threads() > 1 &&
      !omp_in_parallel() && n > 1) {
    // Exceptions may not cross the parallel region; capture the first one
    // and rethrow on the calling thread.
    std::exception_ptr err;
    std::mutex err_mutex;
#pragma omp parallel for schedule(dynamic) num_threads(max_threads())
    for (std::int64_t i = 0; i < n; ++i) {
      try {
        body(ctx, i);
      } catch (...) {
        std::scoped_lock lock(err_mutex);
        if (!err) err = std::current_exception();
      }
    }
    if (err) std::rethrow_exception(err);
    return;
  }
#else
  (void)policy;
#endif
  for (std::int64_t i = 0; i < n; ++i) body(ctx, i);
}

}  // namespace detail
}  // namespace dynrmt
