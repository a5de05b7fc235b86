#pragma once

#if defined(_OPENMP)
#include <omp.h>
#endif

namespace ovo {

// Number of worker threads available to parallel kernels.
inline int hardware_jobs() {
#if defined(_OPENMP)
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// Runs body(i) for i in [0, n). jobs <= 1 runs serially; the OpenMP path
// requires every iteration to write only to its own slots, which keeps
// results identical to the serial path no matter the thread count.
template <typename Body>
void parallel_for(long n, int jobs, Body&& body) {
#if defined(_OPENMP)
    if (jobs > 1 && n > 1) {
#pragma omp parallel for schedule(dynamic) num_threads(jobs)
        for (long i = 0; i < n; ++i) {
            body(i);
        }
        return;
    }
#endif
    for (long i = 0; i < n; ++i) {
        body(i);
    }
}

}  // namespace ovo
