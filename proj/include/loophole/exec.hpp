#pragma once

#ifdef _OPENMP
#include <omp.h>
#endif

namespace loophole {

/// Execution policy for the data-parallel kernels. Every kernel keeps a
/// serial reference path; the parallel path must produce identical results.
enum class Exec { Serial, Parallel };

inline int worker_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

inline void set_worker_count(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

}  // namespace loophole
