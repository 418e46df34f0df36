#include "calibra/parallel.hpp"

#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace calibra {

int thread_count() {
#ifdef _OPENMP
    int n = omp_get_max_threads();
#else
    int n = 1;
#endif
    if (const char* cap = std::getenv("CALIBRA_THREADS")) {
        try {
            const int c = std::stoi(cap);
            if (c >= 1 && c < n) n = c;
        } catch (...) {
        }
    }
    return n;
}

}  // namespace calibra
