#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace scsim {

/// Compensated sum; used for population audits where plain accumulation
/// would drift above the audit tolerance at 1e6 members.
inline double kahan_sum(const Eigen::ArrayXd& v) {
    double sum = 0.0, c = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double y = v[i] - c;
        const double t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    return sum;
}

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

constexpr bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

/// Shortest round-trip decimal form, locale independent.
inline std::string fmt_double(double x) {
    char buf[40];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), x);
    (void)ec;
    return std::string(buf, p);
}

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over fixed-size chunks of [0, n). The chunk grid
/// depends only on n, never on the thread count, so any parallel schedule
/// produces identical results as long as chunks write disjoint state.
inline void parallel_for_chunks(std::int64_t n, int threads,
                                const std::function<void(std::int64_t, std::int64_t)>& fn) {
    constexpr std::int64_t kChunk = 1 << 16;
    const std::int64_t nchunks = (n + kChunk - 1) / kChunk;
    threads = resolve_threads(threads);
    if (threads <= 1 || nchunks <= 1) {
        for (std::int64_t c = 0; c < nchunks; ++c)
            fn(c * kChunk, std::min(n, (c + 1) * kChunk));
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t c = next.fetch_add(1);
                if (c >= nchunks) return;
                fn(c * kChunk, std::min(n, (c + 1) * kChunk));
            }
        });
    }
    for (auto& th : pool) th.join();
}

/// Runs fn(i) for i in [0, n) across threads; each index is independent.
inline void parallel_for_index(std::int64_t n, int threads, const std::function<void(std::int64_t)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n <= 1) {
        for (std::int64_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                const std::int64_t i = next.fetch_add(1);
                if (i >= n) return;
                fn(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace scsim
