#include "polsar/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polsar {

namespace {
#ifdef _OPENMP
const int kDefaultThreads = omp_get_max_threads();
#endif
} // namespace

void set_thread_count(int n) {
#ifdef _OPENMP
    omp_set_num_threads(n >= 1 ? n : kDefaultThreads);
#else
    (void)n;
#endif
}

int thread_count() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

int thread_count_from_env() {
    const char* env = std::getenv("POLSAR_THREADS");
    if (env == nullptr) return 0;
    try {
        int n = std::stoi(env);
        return n > 0 ? n : 0;
    } catch (const std::exception&) {
        return 0;
    }
}

} // namespace polsar
