#ifndef KLEIN_PARALLEL_HPP
#define KLEIN_PARALLEL_HPP

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace klein::num {

// Worker count for grid sweeps: KLEIN_NUM_THREADS if set, else hardware.
inline int sweep_threads() {
    if (const char* env = std::getenv("KLEIN_NUM_THREADS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0,n) across workers. Each index writes only its own
// output slot, so results are ordered and identical to a sequential run.
template <class Body>
void parallel_for(int n, Body&& body, int threads = sweep_threads()) {
    if (n <= 0) return;
    if (threads <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    threads = std::min(threads, n);
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace klein::num

#endif
