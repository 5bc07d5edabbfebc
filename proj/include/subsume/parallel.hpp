#pragma once

#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace subsume {

/// Execution policy for the data-parallel kernels. Every kernel produces
/// bit-identical output under both policies and for any thread count; the
/// serial policy is kept as the reference path for tests and benchmarks.
enum class Exec { serial, openmp };

inline int thread_count(Exec exec) {
#ifdef _OPENMP
    return exec == Exec::openmp ? omp_get_max_threads() : 1;
#else
    (void)exec;
    return 1;
#endif
}

/// Static-schedule parallel loop over [0, n). The body must write only to
/// slots owned by its index so the result is independent of scheduling.
template <typename F>
void parallel_for(Exec exec, std::int64_t n, F&& body) {
#ifdef _OPENMP
    if (exec == Exec::openmp) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    (void)exec;
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

}  // namespace subsume
