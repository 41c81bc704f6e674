#pragma once

// Deterministic path-parallel map: fn(path) is evaluated on a worker pool
// but results are stored at the path's own slot, so the returned vector --
// and anything reduced from it in index order -- is identical for any
// thread count.

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace smhd {

template <typename T, typename Fn>
std::vector<T> map_paths(int n_paths, int n_threads, Fn&& fn) {
    std::vector<T> out(static_cast<std::size_t>(n_paths));
    if (n_threads < 1) n_threads = 1;
    if (n_threads == 1) {
        for (int p = 0; p < n_paths; ++p) out[std::size_t(p)] = fn(p);
        return out;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&] {
        for (;;) {
            const int p = next.fetch_add(1);
            if (p >= n_paths) return;
            try {
                out[std::size_t(p)] = fn(p);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace smhd
