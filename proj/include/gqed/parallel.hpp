#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace gqed {

inline int resolve_workers(int w) {
    if (w > 0) return w;
    return std::max(1u, std::thread::hardware_concurrency());
}

// Runs fn(i) for i in [0, n); each index is independent, so results do not
// depend on the worker count.
template <class Fn>
void parallel_for(int n, int workers, Fn fn) {
    workers = std::min(resolve_workers(workers), std::max(n, 1));
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex mu;
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

}  // namespace gqed
