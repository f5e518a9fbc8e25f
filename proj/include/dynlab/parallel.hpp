#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace dynlab {

inline int resolve_workers(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static striding over [0, n). Tasks must write only to their own slots;
// results are then independent of the worker count. If several tasks throw,
// the one with the lowest index is rethrown, so failures are deterministic
// too.
inline void parallel_for(size_t n, int workers, const std::function<void(size_t)>& body) {
    if (n == 0) return;
    if (workers <= 1 || n == 1) {
        for (size_t i = 0; i < n; ++i) body(i);
        return;
    }
    size_t w = std::min<size_t>(static_cast<size_t>(workers), n);
    std::vector<std::exception_ptr> errs(n);
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (size_t t = 0; t < w; ++t) {
        pool.emplace_back([&, t] {
            for (size_t i = t; i < n; i += w) {
                try {
                    body(i);
                } catch (...) {
                    errs[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    for (size_t i = 0; i < n; ++i)
        if (errs[i]) std::rethrow_exception(errs[i]);
}

}  // namespace dynlab
