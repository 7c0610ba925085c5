#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace bmprior {

// Worker count for internal parallel loops. Defaults to BMPRIOR_THREADS if
// set, else all hardware threads. Results never depend on this value.
unsigned thread_count();
void set_thread_count(unsigned n);

/// Calls fn(worker, begin, end) on contiguous shards of [0, count).
/// Shard boundaries depend only on `count` and the worker count; callers that
/// need thread-count-independent results must reduce in a fixed order.
template <class Fn>
void parallel_shards(std::size_t count, Fn&& fn) {
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(thread_count(), count));
    if (workers == 1) {
        if (count > 0) fn(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = count * w / workers;
        const std::size_t end = count * (w + 1) / workers;
        pool.emplace_back([&, w, begin, end] {
            try {
                fn(w, begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

// fn(i) for every i in [0, count); fn must only touch per-index state.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    parallel_shards(count, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace bmprior
