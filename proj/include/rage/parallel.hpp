#pragma once

#include <algorithm>
#include <exception>
#include <functional>
#include <future>
#include <thread>
#include <vector>

namespace rage {

/// Runs fn(i) for i in [0, count) across up to `threads` workers (0 = hardware
/// concurrency). Work is split into contiguous chunks; fn must only touch
/// disjoint state per index so the result is identical for any worker count.
inline void parallel_for_index(int count, int threads, const std::function<void(int)>& fn) {
    if (count <= 0) return;
    int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
    workers = std::max(1, std::min(workers, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    const int chunk = (count + workers - 1) / workers;
    std::vector<std::future<void>> futures;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        futures.push_back(std::async(std::launch::async, [begin, end, &fn] {
            for (int i = begin; i < end; ++i) fn(i);
        }));
    }
    std::exception_ptr first_error;
    for (auto& f : futures) {
        try {
            f.get();
        } catch (...) {
            if (!first_error) first_error = std::current_exception();
        }
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace rage
