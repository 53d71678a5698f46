#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bolimes {

/// Number of workers to use: `requested` if positive, otherwise the hardware
/// concurrency (at least 1).
inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, n). Tasks must write only to their own slots;
/// under that contract the result is independent of thread count and
/// scheduling. Exceptions from workers are rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
    const int workers = std::min<std::size_t>(resolve_threads(n_threads), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    if (!failed.exchange(true)) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace bolimes
