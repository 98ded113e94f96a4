#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace pansharp {

/// Degree of parallelism for row/tile loops.
///
/// Work is always split into index ranges whose results are written to disjoint
/// outputs, so the result never depends on `threads` or `grain`.
struct Parallelism {
    unsigned threads = 1;
    /// Indices per task; 0 picks an even split across threads.
    std::size_t grain = 0;
};

/// Calls `fn(begin, end)` over consecutive sub-ranges covering [0, n).
template <typename Fn>
void parallel_for(std::size_t n, const Parallelism& par, Fn&& fn)
{
    if (n == 0) {
        return;
    }
    const std::size_t workers = std::min<std::size_t>(std::max(1u, par.threads), n);
    if (workers == 1) {
        fn(std::size_t{0}, n);
        return;
    }
    const std::size_t grain = par.grain != 0 ? par.grain : (n + workers - 1) / workers;
    const std::size_t chunks = (n + grain - 1) / grain;

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t chunk = next.fetch_add(1);
            if (chunk >= chunks) {
                return;
            }
            const std::size_t begin = chunk * grain;
            const std::size_t end = std::min(n, begin + grain);
            try {
                fn(begin, end);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(chunks);
                return;
            }
        }
    };

    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (std::size_t i = 1; i < workers; ++i) {
        pool.emplace_back(worker);
    }
    worker();
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

} // namespace pansharp
