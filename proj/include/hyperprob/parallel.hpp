#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace hyperprob {

inline unsigned resolve_jobs(unsigned jobs) {
    if (jobs != 0) return jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Least index in [0, count) for which pred holds, or nullopt. Indices are
/// handed out in increasing order to `jobs` workers; the answer does not
/// depend on the number of workers. pred must be safe to call concurrently.
template <class Pred>
std::optional<std::uint64_t> find_first(std::uint64_t count, unsigned jobs, Pred pred) {
    jobs = resolve_jobs(jobs);
    if (jobs == 1 || count < 2) {
        for (std::uint64_t i = 0; i < count; ++i) {
            if (pred(i)) return i;
        }
        return std::nullopt;
    }
    std::atomic<std::uint64_t> next{0};
    std::atomic<std::uint64_t> best{count};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        try {
            for (;;) {
                std::uint64_t i = next.fetch_add(1);
                if (i >= count || i >= best.load()) return;
                if (pred(i)) {
                    std::uint64_t cur = best.load();
                    while (i < cur && !best.compare_exchange_weak(cur, i)) {
                    }
                    return;
                }
            }
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            best.store(0);
        }
    };
    std::vector<std::thread> threads;
    unsigned n = static_cast<unsigned>(std::min<std::uint64_t>(jobs, count));
    for (unsigned t = 0; t < n; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (failure) std::rethrow_exception(failure);
    std::uint64_t b = best.load();
    if (b == count) return std::nullopt;
    return b;
}

}  // namespace hyperprob
