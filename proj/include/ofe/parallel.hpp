#pragma once

// Index-scheduled worker pool for embarrassingly parallel grids. Each index
// is claimed exactly once via an atomic counter; the body writes results
// into per-index slots it owns, so the outcome is independent of scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace ofe {

inline unsigned resolve_worker_count(unsigned requested) {
    if (requested != 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

// Runs body(i) for i in [0, n). workers == 0 means one per hardware thread,
// workers == 1 runs inline on the calling thread. The first exception thrown
// by any body is rethrown after the pool drains; remaining indices are
// abandoned at that point.
template <class F>
void parallel_for(std::size_t n, unsigned workers, F&& body) {
    if (n == 0) return;
    workers = static_cast<unsigned>(
        std::min<std::size_t>(resolve_worker_count(workers), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i; (i = next.fetch_add(1)) < n;) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
                next.store(n);
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace ofe
