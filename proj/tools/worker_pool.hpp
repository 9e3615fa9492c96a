#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace walkscope::cli {

/// Calls fn(i) for every i in [0, n) on up to `workers` threads. Tiles are
/// claimed through a shared counter; callers store results by index so the
/// output order never depends on scheduling. fn must not throw.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const auto threads = static_cast<std::size_t>(std::max(1, workers));
    if (threads == 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    auto drain = [&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(std::min(threads, n));
    for (std::size_t t = 0; t < std::min(threads, n); ++t) {
        pool.emplace_back(drain);
    }
    for (std::thread& t : pool) {
        t.join();
    }
}

} // namespace walkscope::cli
