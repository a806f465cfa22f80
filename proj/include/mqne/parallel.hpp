#pragma once

#include <cstddef>

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace mqne {

// Static-schedule parallel loop over [0, n). Each iteration must write only
// to its own output slot; any reduction happens afterwards in index order, so
// results do not depend on the thread count.
template <typename Fn> void parallel_for(std::size_t n, int threads, Fn &&fn) {
#if defined(_OPENMP)
    if (threads > 1 && n > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            fn(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    (void)threads;
    for (std::size_t i = 0; i < n; ++i) {
        fn(i);
    }
}

} // namespace mqne
