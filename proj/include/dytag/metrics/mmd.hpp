#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "dytag/util/error.hpp"
#include "dytag/util/rng.hpp"

namespace dytag {

using Sample = std::vector<double>;

enum class SmoothingMode { fixed, median_heuristic };

struct MmdConfig {
    double smoothing = 1.0; ///< kernel width v, used when mode == fixed
    SmoothingMode smoothing_mode = SmoothingMode::median_heuristic;
};

/// exp(-|x - y|^2 / (2 v^2)).
inline double rbf_kernel(std::span<const double> x, std::span<const double> y, double v)
{
    if (x.size() != y.size())
        throw InvalidArgument("rbf_kernel: dimension mismatch (" + std::to_string(x.size()) + " vs "
                              + std::to_string(y.size()) + ")");
    if (!(v > 0)) throw InvalidArgument("rbf_kernel: smoothing must be positive");
    double sq = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double d = x[k] - y[k];
        sq += d * d;
    }
    return std::exp(-sq / (2.0 * v * v));
}

namespace detail {

// Sample sets are deduplicated into (value, multiplicity) before any
// quadratic work; degree sequences have few distinct values.
struct WeightedSet {
    std::vector<Sample> points;
    std::vector<double> counts;
    double total = 0.0;
};

inline WeightedSet compress(std::span<const Sample> xs)
{
    std::map<Sample, double> m;
    for (const auto& x : xs) m[x] += 1.0;
    WeightedSet w;
    for (auto& [p, c] : m) {
        w.points.push_back(p);
        w.counts.push_back(c);
        w.total += c;
    }
    return w;
}

inline double squared_distance(const Sample& a, const Sample& b)
{
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

inline double weighted_kernel_sum(const WeightedSet& a, const WeightedSet& b, double v)
{
    const double denom = 2.0 * v * v;
    double s = 0.0;
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < b.points.size(); ++j)
            row += b.counts[j] * std::exp(-squared_distance(a.points[i], b.points[j]) / denom);
        s += a.counts[i] * row;
    }
    return s;
}

inline void check_samples(std::span<const Sample> xs, std::span<const Sample> ys)
{
    if (xs.empty() || ys.empty()) throw InvalidArgument("mmd: empty sample set");
    const std::size_t dim = xs.front().size();
    for (const auto& x : xs)
        if (x.size() != dim) throw InvalidArgument("mmd: dimension mismatch within first sample set");
    for (const auto& y : ys)
        if (y.size() != dim) throw InvalidArgument("mmd: dimension mismatch between sample sets");
}

/// Pairs beyond this count are subsampled for the median heuristic.
inline constexpr std::size_t kMedianPairLimit = 2'000'000;

} // namespace detail

/// Median of pairwise distances over the union of both sets, floored at 1e-6.
/// Exact up to kMedianPairLimit distinct-index pairs, otherwise estimated from
/// a fixed-seed sample of pairs.
inline double median_heuristic(std::span<const Sample> xs, std::span<const Sample> ys)
{
    std::vector<const Sample*> all;
    all.reserve(xs.size() + ys.size());
    for (const auto& x : xs) all.push_back(&x);
    for (const auto& y : ys) all.push_back(&y);
    // Sort so the estimate does not depend on argument order.
    std::sort(all.begin(), all.end(), [](const Sample* a, const Sample* b) { return *a < *b; });

    const std::size_t n = all.size();
    if (n < 2) return 1e-6;
    std::vector<double> d;
    const std::size_t pairs = n * (n - 1) / 2;
    if (pairs <= detail::kMedianPairLimit) {
        d.reserve(pairs);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) d.push_back(std::sqrt(detail::squared_distance(*all[i], *all[j])));
    } else {
        Rng rng{0x6d65646961'6e00ULL};
        d.reserve(detail::kMedianPairLimit);
        while (d.size() < detail::kMedianPairLimit) {
            const auto i = uniform_index(rng, n), j = uniform_index(rng, n);
            if (i != j) d.push_back(std::sqrt(detail::squared_distance(*all[i], *all[j])));
        }
    }
    auto mid = d.begin() + static_cast<std::ptrdiff_t>(d.size() / 2);
    std::nth_element(d.begin(), mid, d.end());
    double med = *mid;
    if (d.size() % 2 == 0) {
        const double lower = *std::max_element(d.begin(), mid);
        med = 0.5 * (med + lower);
    }
    return std::max(med, 1e-6);
}

inline double resolve_smoothing(std::span<const Sample> xs, std::span<const Sample> ys, const MmdConfig& cfg)
{
    if (cfg.smoothing_mode == SmoothingMode::fixed) {
        if (!(cfg.smoothing > 0)) throw InvalidArgument("mmd: fixed smoothing must be positive");
        return cfg.smoothing;
    }
    return median_heuristic(xs, ys);
}

/// Biased MMD^2 estimate with kernel width v, before clamping. Symmetric in
/// its arguments bit-for-bit: the cross term is always evaluated with the
/// lexicographically smaller set on the outside.
inline double mmd_squared_unclamped(std::span<const Sample> xs, std::span<const Sample> ys, double v)
{
    detail::check_samples(xs, ys);
    auto a = detail::compress(xs);
    auto b = detail::compress(ys);
    if (std::tie(b.total, b.points, b.counts) < std::tie(a.total, a.points, a.counts)) std::swap(a, b);
    const double kxx = detail::weighted_kernel_sum(a, a, v) / (a.total * a.total);
    const double kyy = detail::weighted_kernel_sum(b, b, v) / (b.total * b.total);
    const double kxy = detail::weighted_kernel_sum(a, b, v) / (a.total * b.total);
    return (kxx + kyy) - 2.0 * kxy;
}

/// MMD^2(X, Y) under an RBF kernel; floating-point residue below zero is clamped to 0.
inline double mmd_squared(std::span<const Sample> xs, std::span<const Sample> ys, const MmdConfig& cfg = {})
{
    detail::check_samples(xs, ys);
    return std::max(0.0, mmd_squared_unclamped(xs, ys, resolve_smoothing(xs, ys, cfg)));
}

template <class T>
std::vector<Sample> scalar_samples(const std::vector<T>& values)
{
    std::vector<Sample> out;
    out.reserve(values.size());
    for (const auto& v : values) out.push_back(Sample{static_cast<double>(v)});
    return out;
}

} // namespace dytag
