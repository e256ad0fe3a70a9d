#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qsl {

/// Worker cap from QSL_THREADS (0 or unset = hardware concurrency).
inline unsigned worker_count() {
    static const unsigned n = [] {
        long v = 0;
        if (const char* env = std::getenv("QSL_THREADS")) v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
        const unsigned hc = std::thread::hardware_concurrency();
        return hc == 0 ? 1u : hc;
    }();
    return n;
}

/// Runs f(i) for i in [0, n). Work items must be independent; the first
/// exception is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                f(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < workers; ++k) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace qsl
