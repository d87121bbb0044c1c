#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace qkt {

/// Run fn(i) for i in [0, n) on up to n_threads workers. Results must be
/// written into per-index slots; aggregation stays with the caller so output
/// is independent of scheduling.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn&& fn) {
    if (n == 0) return;
    if (n_threads <= 0) n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads <= 1 || n == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(n_threads), n);
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& t : pool) t.join();
}

/// process-wide default worker count, set once by the CLI --threads flag
int default_threads();
void set_default_threads(int n);

}  // namespace qkt
