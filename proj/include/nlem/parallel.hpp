#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace nlem::parallel {

// Worker count: hardware concurrency, optionally capped by NLEM_THREADS,
// never more than there are items.
inline int worker_count(std::size_t items) {
    if (items == 0) return 1;
    unsigned workers = std::thread::hardware_concurrency();
    if (workers == 0) workers = 1;
    if (const char* env = std::getenv("NLEM_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1)
            workers = std::min<unsigned>(workers, static_cast<unsigned>(cap));
    }
    return static_cast<int>(std::min<std::size_t>(workers, items));
}

// Runs fn(begin, end, worker_id) over [0, n) split into contiguous blocks,
// one block per worker. Workers share nothing; each index is processed by
// exactly one worker, so results are identical for any worker count.
template <class Fn>
void for_blocks(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1) {
        fn(std::size_t{0}, n, 0);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(workers));
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int b = 0; b < workers; ++b) {
        const std::size_t begin = n * static_cast<std::size_t>(b) / workers;
        const std::size_t end = n * static_cast<std::size_t>(b + 1) / workers;
        threads.emplace_back([&, b, begin, end] {
            try {
                fn(begin, end, b);
            } catch (...) {
                errors[static_cast<std::size_t>(b)] = std::current_exception();
            }
        });
    }
    for (auto& t : threads)
        t.join();
    for (const auto& err : errors)
        if (err)
            std::rethrow_exception(err);
}

template <class Fn>
void for_blocks(std::size_t n, Fn&& fn) {
    for_blocks(n, worker_count(n), std::forward<Fn>(fn));
}

} // namespace nlem::parallel
