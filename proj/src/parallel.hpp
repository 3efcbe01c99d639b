#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hypersr {

// Worker count for fitness evaluation. HYPERSR_THREADS overrides the
// hardware default; values are clamped to [1, 256].
int resolve_workers();

// Runs fn(begin, end) over a static partition of [0, n) on the given number
// of workers. The first exception thrown by any chunk is rethrown here.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (n == 0) return;
    const std::size_t w =
        std::min<std::size_t>(static_cast<std::size_t>(workers > 0 ? workers : 1), n);
    if (w <= 1) {
        fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(w - 1);
    std::vector<std::exception_ptr> errors(w);
    auto chunk = [&](std::size_t t) {
        const std::size_t begin = n * t / w;
        const std::size_t end = n * (t + 1) / w;
        try {
            fn(begin, end);
        } catch (...) {
            errors[t] = std::current_exception();
        }
    };
    for (std::size_t t = 1; t < w; ++t) {
        threads.emplace_back(chunk, t);
    }
    chunk(0);
    for (auto& th : threads) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace hypersr
