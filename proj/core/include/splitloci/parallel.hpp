#pragma once
#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace splitloci {

// Chunked parallel loop over [0, n). Results written by index keep the reduction
// deterministic regardless of scheduling.
inline void parallel_for(int n, const std::function<void(int)>& body) {
    if (n <= 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    int workers = std::max(1, static_cast<int>(hw ? hw : 4));
    workers = std::min(workers, n);
    if (workers == 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    int chunk = (n + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        int begin = w * chunk;
        int end = std::min(n, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([begin, end, &body] {
            for (int i = begin; i < end; ++i) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace splitloci
