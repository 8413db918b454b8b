// Seed streams, order-independent reductions and a tiny fork/join helper.
//
// Every stochastic routine in the library draws sample i from an RNG seeded by
// derive_seed(base, i), and every reduction sums a vector indexed by sample
// number. Results therefore do not depend on how many workers ran.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace eqt {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for stream `stream` of a run seeded with `base`.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

// Neumaier (improved Kahan) summation.
class CompensatedSum {
public:
    void add(double x) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double stable_sum(std::span<const double> values) noexcept;

struct SampleStats {
    double mean = 0.0;
    double stderr_mean = 0.0;  // sample std / sqrt(n)
    std::size_t samples = 0;
};

SampleStats sample_stats(std::span<const double> values);

/// Runs fn(i) for i in [0, n). workers == 0 means hardware concurrency.
/// The first exception thrown by any worker is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(n, 1)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace eqt
