#pragma once

// Seeded random streams and a deterministic parallel map.
//
// Every independent unit of Monte Carlo work (an ensemble member, a simulated
// award) owns a generator derived from (master seed, indices). Results are
// written to per-index slots, so the output never depends on thread count or
// scheduling order.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <random>
#include <thread>
#include <vector>

namespace fwci {

using Stream = std::mt19937_64;

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

inline Stream make_stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
    return Stream{derive_seed(seed, a, b)};
}

// Worker count used by parallel_for; 0 means hardware concurrency.
void set_worker_count(unsigned n);
unsigned worker_count();

template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const unsigned workers = static_cast<unsigned>(
        std::min<std::size_t>(worker_count(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    // Small fixed-size blocks keep the load balanced when items differ in cost.
    constexpr std::size_t block = 64;
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t start = next.fetch_add(block);
            if (start >= n) return;
            const std::size_t stop = std::min(n, start + block);
            for (std::size_t i = start; i < stop; ++i) body(i);
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
}

}  // namespace fwci
