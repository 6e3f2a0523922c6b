#pragma once

#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace radonseis {

inline unsigned default_thread_count() {
    unsigned n = std::thread::hardware_concurrency();
    return n == 0 ? 1 : n;
}

// Static block partition of [begin, end); fn(i) must write only to slot i
// of some preallocated output so results are independent of the thread
// count. Exceptions propagate from the calling thread's block only after
// all workers joined.
template <class Fn>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Fn&& fn) {
    const std::size_t total = end > begin ? end - begin : 0;
    if (threads == 0) threads = default_thread_count();
    if (threads <= 1 || total < 2) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    if (threads > total) threads = static_cast<unsigned>(total);
    const std::size_t chunk = (total + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::exception_ptr err;
    std::mutex err_mutex;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::size_t lo = begin + chunk * t;
        const std::size_t hi = lo + chunk < end ? lo + chunk : end;
        if (lo >= hi) break;
        pool.emplace_back([&, lo, hi] {
            try {
                for (std::size_t i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace radonseis
