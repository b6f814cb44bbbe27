#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fracflow {

/// Worker count: FRACFLOW_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("FRACFLOW_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v > 0) return static_cast<unsigned>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) over contiguous blocks. Each index is handled
/// by exactly one worker, so results written per index do not depend on the
/// thread count.
template <class Body>
void parallel_for(std::size_t n, Body&& body) {
    const std::size_t workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(1, n / 16));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk, hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

/// Compensated (Neumaier) accumulator.
struct NeumaierSum {
    double sum{0.0};
    double comp{0.0};

    void add(double x) {
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x)) comp += (sum - t) + x;
        else comp += (x - t) + sum;
        sum = t;
    }
    double value() const { return sum + comp; }
};

}  // namespace fracflow
