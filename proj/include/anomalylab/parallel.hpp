#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "errors.hpp"

namespace anomalylab {

namespace detail {
inline std::atomic<int>& thread_override()
{
    static std::atomic<int> n{0};
    return n;
}
} // namespace detail

// Explicit override (CLI --threads); 0 restores the default.
inline void set_thread_count(int n)
{
    if (n < 0) throw DomainError("thread count must be non-negative");
    detail::thread_override() = n;
}

// Worker count: explicit override, else ANOMALYLAB_THREADS, else hardware.
inline int thread_count()
{
    if (int n = detail::thread_override(); n > 0) return n;
    if (const char* env = std::getenv("ANOMALYLAB_THREADS")) {
        try {
            const int n = std::stoi(env);
            if (n > 0) return n;
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Run f(i) for i in [0, n). Work is split into fixed-size chunks that do not
// depend on the thread count, so any per-chunk reduction is reproducible.
template <class F>
void parallel_for(size_t n, F f, size_t chunk = 64)
{
    if (n == 0) return;
    const size_t n_chunks = (n + chunk - 1) / chunk;
    const size_t workers = std::min<size_t>(static_cast<size_t>(thread_count()), n_chunks);
    auto run_chunk = [&](size_t c) {
        const size_t lo = c * chunk, hi = std::min(n, lo + chunk);
        for (size_t i = lo; i < hi; ++i) f(i);
    };
    if (workers <= 1) {
        for (size_t c = 0; c < n_chunks; ++c) run_chunk(c);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (size_t c = next++; c < n_chunks; c = next++) run_chunk(c);
        });
    for (auto& t : pool) t.join();
}

// Pairwise (tree) summation in fixed index order.
template <class T>
T pairwise_sum(const T* v, size_t n)
{
    if (n == 0) return T(0);
    if (n <= 8) {
        T s = v[0];
        for (size_t i = 1; i < n; ++i) s += v[i];
        return s;
    }
    const size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

template <class T>
T pairwise_sum(const std::vector<T>& v)
{
    return pairwise_sum(v.data(), v.size());
}

} // namespace anomalylab
