#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace cldp {

/// Number of workers to use: `requested` if nonzero, else the CLDP_WORKERS
/// environment variable, else the hardware concurrency.
unsigned resolve_workers(unsigned requested);

/// Calls fn(i) for i in [0, n) on `workers` threads. Work is handed out in
/// fixed-size chunks; callers write results to slot i so the outcome does not
/// depend on scheduling. The first exception thrown by fn is rethrown.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, workers);
    if (workers == 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        while (true) {
            const std::size_t start = next.fetch_add(kChunk);
            if (start >= n) return;
            const std::size_t stop = std::min(n, start + kChunk);
            try {
                for (std::size_t i = start; i < stop; ++i) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(std::min<std::size_t>(workers, (n + kChunk - 1) / kChunk));
    for (unsigned w = 1; w < spawn; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace cldp
