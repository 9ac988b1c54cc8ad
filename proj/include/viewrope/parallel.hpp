#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace viewrope {

/// Worker cap: min(VIEWROPE_THREADS, hardware concurrency), at least 1.
inline int max_threads() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw <= 0) hw = 1;
    if (const char* env = std::getenv("VIEWROPE_THREADS")) {
        const int cap = std::atoi(env);
        if (cap > 0) hw = std::min(hw, cap);
    }
    return hw;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own outputs, so
/// results do not depend on the thread count.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(max_threads(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (int i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace viewrope
