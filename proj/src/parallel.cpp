#include "geomatch/parallel.hpp"

#include <cstdlib>

namespace geomatch {

int thread_budget() {
    static const int budget = [] {
        long v = 0;
        if (const char* env = std::getenv("GEOMATCH_THREADS")) {
            char* end = nullptr;
            v = std::strtol(env, &end, 10);
            if (end == env || *end != '\0') v = 0;
        }
        if (v <= 0) v = static_cast<long>(std::thread::hardware_concurrency());
        if (v < 1) v = 1;
        if (v > 256) v = 256;
        return static_cast<int>(v);
    }();
    return budget;
}

}  // namespace geomatch
