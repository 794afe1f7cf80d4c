#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace knnup {

namespace detail {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// Run fn(row) for every row in [0, row_count). Rows are split into contiguous
// blocks, one per thread; each row must only touch state owned by that row, so
// results are identical at every thread count.
template <typename Fn>
void parallel_rows(int row_count, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || row_count <= 1) {
        for (int r = 0; r < row_count; ++r) fn(r);
        return;
    }
    int workers = std::min(threads, row_count);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) {
        int begin = static_cast<int>(static_cast<long long>(row_count) * t / workers);
        int end = static_cast<int>(static_cast<long long>(row_count) * (t + 1) / workers);
        pool.emplace_back([&, begin, end, t] {
            try {
                for (int r = begin; r < end; ++r) fn(r);
            } catch (...) {
                errors[static_cast<std::size_t>(t)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors) {
        if (err) std::rethrow_exception(err);
    }
}

} // namespace detail

} // namespace knnup
