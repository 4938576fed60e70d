#pragma once

// Reproducible random streams, order-independent reductions and a small
// index-parallel loop. Every Monte Carlo estimator derives one stream per
// sample (child_seed = mix(master_seed, task_index)) and reduces per-sample
// results in index order, so results do not depend on the worker count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <span>
#include <thread>
#include <utility>
#include <vector>

namespace hypcocycle {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index)
{
    return splitmix64(master ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

/// A reproducible random stream identified by (master_seed, stream_index).
class RngStream {
public:
    explicit RngStream(std::uint64_t master_seed = 0, std::uint64_t stream_index = 0)
        : master_(master_seed), index_(stream_index), engine_(mix_seed(master_seed, stream_index))
    {
    }

    std::uint64_t master_seed() const { return master_; }
    std::uint64_t stream_index() const { return index_; }

    /// Independent stream for sub-task `task`.
    RngStream child(std::uint64_t task) const { return RngStream(mix_seed(master_, index_), task); }

    std::uint64_t next() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Two independent standard normals (Box-Muller).
    std::pair<double, double> normal_pair()
    {
        const double u1 = 1.0 - uniform(); // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

    double normal() { return normal_pair().first; }

private:
    std::uint64_t master_;
    std::uint64_t index_;
    std::mt19937_64 engine_;
};

/// Pairwise (tree) summation in index order.
inline double pairwise_sum(std::span<const double> xs)
{
    if (xs.size() <= 8) {
        double s = 0.0;
        for (double x : xs)
            s += x;
        return s;
    }
    const std::size_t half = xs.size() / 2;
    return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
};

/// Sample mean and standard error of the mean.
inline Estimate mean_and_error(std::span<const double> xs)
{
    if (xs.empty())
        return {};
    const double n = static_cast<double>(xs.size());
    const double mean = pairwise_sum(xs) / n;
    if (xs.size() < 2)
        return {mean, 0.0};
    std::vector<double> sq(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i)
        sq[i] = (xs[i] - mean) * (xs[i] - mean);
    const double var = pairwise_sum(sq) / (n - 1.0);
    return {mean, std::sqrt(var / n)};
}

/// Empirical quantile with linear interpolation (type 7).
inline double quantile(std::vector<double> xs, double q)
{
    if (xs.empty())
        return 0.0;
    std::sort(xs.begin(), xs.end());
    const double pos = q * static_cast<double>(xs.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, xs.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return xs[lo] + frac * (xs[hi] - xs[lo]);
}

/// Process-wide default worker count (the CLI sets it from the config).
inline std::atomic<unsigned>& default_workers_setting()
{
    static std::atomic<unsigned> workers{0};
    return workers;
}

inline unsigned default_workers()
{
    const unsigned w = default_workers_setting().load();
    if (w != 0)
        return w;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs body(i) for i in [0, n) on `workers` threads. The first exception
/// thrown by any task is rethrown after all threads finish.
template <class Body>
void parallel_for(std::size_t n, unsigned workers, Body&& body)
{
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n)
                return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back(worker);
    pool.clear();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace hypcocycle
