#include "meshless/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace meshless {

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

void set_max_threads(int n) {
#ifdef _OPENMP
    if (n > 0) omp_set_num_threads(n);
#else
    (void)n;
#endif
}

int configure_threads_from_env() {
    if (const char* v = std::getenv("MESHLESS_GROWTH_THREADS")) {
        try {
            set_max_threads(std::stoi(v));
        } catch (const std::exception&) {
            // unparsable value: keep the runtime default
        }
    }
    return max_threads();
}

}  // namespace meshless
