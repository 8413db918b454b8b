#include "eqt/parallel.hpp"

#include <cmath>

namespace eqt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(base) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void CompensatedSum::add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
        compensation_ += (sum_ - t) + x;
    } else {
        compensation_ += (x - t) + sum_;
    }
    sum_ = t;
}

double stable_sum(std::span<const double> values) noexcept {
    CompensatedSum s;
    for (double v : values) s.add(v);
    return s.value();
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats out;
    out.samples = values.size();
    if (values.empty()) return out;
    const double n = static_cast<double>(values.size());
    out.mean = stable_sum(values) / n;
    if (values.size() < 2) return out;
    CompensatedSum sq;
    for (double v : values) sq.add((v - out.mean) * (v - out.mean));
    const double variance = sq.value() / (n - 1.0);
    out.stderr_mean = std::sqrt(variance / n);
    return out;
}

}  // namespace eqt
