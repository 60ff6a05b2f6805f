#ifndef PEARL_FLOER_PARALLEL_HPP
#define PEARL_FLOER_PARALLEL_HPP

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace pearl {

// Worker count: hardware concurrency, capped by PEARL_FLOER_THREADS.
inline unsigned worker_count()
{
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("PEARL_FLOER_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

/**
 * Runs fn(i) for i in [0, count) on contiguous blocks.  Results must be
 * written to per-index slots; if any call throws, the exception of the
 * lowest failing index is rethrown once all workers have finished.
 */
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn)
{
    const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, count / 64));
    std::vector<std::exception_ptr> errors(count);
    auto run_block = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        run_block(0, count);
    } else {
        std::vector<std::jthread> threads;
        const std::size_t chunk = (count + workers - 1) / workers;
        for (std::size_t w = 0; w < workers; ++w) {
            const std::size_t lo = w * chunk;
            const std::size_t hi = std::min(count, lo + chunk);
            if (lo < hi)
                threads.emplace_back(run_block, lo, hi);
        }
    }
    for (auto& e : errors)
        if (e)
            std::rethrow_exception(e);
}

} // namespace pearl

#endif
