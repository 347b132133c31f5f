#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fraccond/core/grid.hpp"

namespace fraccond {

namespace detail {
inline std::atomic<int>& thread_setting() {
    static std::atomic<int> count{1};
    return count;
}
} // namespace detail

/// Worker count used by parallel loops. Results never depend on it.
inline void set_thread_count(int count) { detail::thread_setting().store(std::max(1, count)); }
inline int thread_count() { return detail::thread_setting().load(); }

/// Runs body(i) for i in [begin, end) over contiguous blocks.
template <class F>
void parallel_for(Index begin, Index end, F&& body) {
    const Index total = end - begin;
    if (total <= 0) return;
    const Index workers = std::min<Index>(thread_count(), total);
    if (workers <= 1) {
        for (Index i = begin; i < end; ++i) body(i);
        return;
    }
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (Index w = 0; w < workers; ++w) {
        const Index lo = begin + total * w / workers;
        const Index hi = begin + total * (w + 1) / workers;
        pool.emplace_back([&, lo, hi] {
            try {
                for (Index i = lo; i < hi; ++i) body(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

} // namespace fraccond
