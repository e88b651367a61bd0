#include "curve3dvg/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace c3vg {

int worker_count() {
    if (const char* env = std::getenv("CURVE3DVG_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

void parallel_indexed_chunks(
    std::size_t n, const std::function<void(int, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) {
        fn(0, 0, n);
        return;
    }
    const std::size_t chunk = (n + workers - 1) / workers;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, w, lo, hi] { fn(static_cast<int>(w), lo, hi); });
    }
    for (auto& t : pool) t.join();
}

void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t)>& fn) {
    parallel_indexed_chunks(n, [&fn](int, std::size_t lo, std::size_t hi) { fn(lo, hi); });
}

int chunk_count(std::size_t n) {
    if (n == 0) return 0;
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
    if (workers <= 1) return 1;
    const std::size_t chunk = (n + workers - 1) / workers;
    return static_cast<int>((n + chunk - 1) / chunk);
}

}  // namespace c3vg
