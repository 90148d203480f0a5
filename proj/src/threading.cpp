#include "rfreg/threading.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rfreg {

namespace {
int g_num_threads = 0;  // 0 = runtime default
}

void set_num_threads(int n) {
    g_num_threads = n;
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#endif
}

int num_threads() {
#ifdef _OPENMP
    if (g_num_threads > 0) return g_num_threads;
    return omp_get_max_threads();
#else
    return 1;
#endif
}

bool parallel_enabled() { return num_threads() > 1; }

}  // namespace rfreg
