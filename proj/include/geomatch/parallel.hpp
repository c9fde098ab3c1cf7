#pragma once

#include <cstdint>
#include <exception>
#include <thread>
#include <vector>

namespace geomatch {

/// Worker budget: GEOMATCH_THREADS caps it, 0 or unset means one thread per
/// hardware core.
int thread_budget();

/// Number of chunks a range of n items will be split into (callers size
/// their per-chunk result buffers with this).
inline int plan_chunks(std::int64_t n, std::int64_t min_chunk) {
    if (n <= 0) return 0;
    std::int64_t by_size = (n + min_chunk - 1) / min_chunk;
    std::int64_t c = thread_budget();
    if (by_size < c) c = by_size;
    return static_cast<int>(c < 1 ? 1 : c);
}

/// Runs fn(chunk, begin, end) over chunks of [0, n). Chunk boundaries depend
/// only on n and the thread budget, never on scheduling, so per-chunk results
/// reduce deterministically. Exceptions propagate (first chunk wins).
template <class Fn>
void parallel_chunks(std::int64_t n, std::int64_t min_chunk, Fn&& fn) {
    int nc = plan_chunks(n, min_chunk);
    if (nc <= 1) {
        if (n > 0) fn(0, std::int64_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(nc);
    std::vector<std::thread> threads;
    threads.reserve(nc);
    for (int c = 0; c < nc; ++c) {
        std::int64_t begin = n * c / nc;
        std::int64_t end = n * (c + 1) / nc;
        threads.emplace_back([&, c, begin, end] {
            try {
                fn(c, begin, end);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& t : threads) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace geomatch
