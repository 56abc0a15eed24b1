#pragma once

#include <cstdint>

namespace dynrmt {

/// Every data-parallel kernel takes one of these. `serial` is the reference
/// path used by the tests and the benchmark; `parallel` runs the same loop
/// body under OpenMP. Outputs are bit-identical by construction because loop
/// iterations never share mutable state and reductions are ordered folds.
enum class ExecPolicy { serial, parallel };

/// Worker cap for ExecPolicy::parallel (CLI --jobs). 0 = hardware default.
void set_max_threads(int n);
int max_threads();

namespace detail {
void run_indexed(ExecPolicy policy, std::int64_t n, void* ctx,
                 void (*body)(void*, std::int64_t));
}

template <typename F>
void parallel_for(ExecPolicy policy, std::int64_t n, F&& body) {
  detail::run_indexed(policy, n, &body, [](void* ctx, std::int64_t i) {
    (*static_cast<F*>(ctx))(i);
  });
}

}  // namespace dynrmt
