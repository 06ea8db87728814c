#pragma once

// Independent reference computations. Nothing here calls into the code under
// test beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include <gsl/gsl_sf_zeta.h>

namespace dytag::oracle {

/// Textbook three-term biased MMD^2 with a triple loop, no deduplication.
inline double brute_force_mmd2(const std::vector<std::vector<double>>& X, const std::vector<std::vector<double>>& Y,
                               double v)
{
    auto k = [v](const std::vector<double>& a, const std::vector<double>& b) {
        double s = 0;
        for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
        return std::exp(-s / (2 * v * v));
    };
    const double n = static_cast<double>(X.size()), m = static_cast<double>(Y.size());
    double xx = 0, yy = 0, xy = 0;
    for (const auto& a : X)
        for (const auto& b : X) xx += k(a, b);
    for (const auto& a : Y)
        for (const auto& b : Y) yy += k(a, b);
    for (const auto& a : X)
        for (const auto& b : Y) xy += k(a, b);
    return xx / (n * n) + yy / (m * m) - 2 * xy / (n * m);
}

/// Exact inverse-CDF sampler for p(k) = k^-alpha / zeta(alpha, k_min), k >= k_min.
/// CDF tabulated by direct summation up to `table` values; beyond that the
/// Hurwitz-zeta tail and bisection.
class DiscretePowerLawSampler {
public:
    DiscretePowerLawSampler(double alpha, std::int64_t k_min, std::int64_t table = 100000)
        : alpha_(alpha), k_min_(k_min)
    {
        const double z = gsl_sf_hzeta(alpha, static_cast<double>(k_min));
        double c = 0;
        for (std::int64_t k = k_min; k < k_min + table; ++k) {
            c += std::pow(static_cast<double>(k), -alpha) / z;
            cdf_.push_back(c);
        }
        z_ = z;
    }

    std::int64_t operator()(std::mt19937_64& rng) const
    {
        const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        if (it != cdf_.end()) return k_min_ + (it - cdf_.begin());
        std::int64_t lo = k_min_ + static_cast<std::int64_t>(cdf_.size()) - 1, hi = lo * 2;
        while (cdf(hi) < u) hi *= 2;
        while (hi - lo > 1) {
            const auto mid = lo + (hi - lo) / 2;
            (cdf(mid) < u ? lo : hi) = mid;
        }
        return hi;
    }

    double cdf(std::int64_t k) const { return 1.0 - gsl_sf_hzeta(alpha_, static_cast<double>(k + 1)) / z_; }

private:
    double alpha_;
    std::int64_t k_min_;
    double z_ = 1.0;
    std::vector<double> cdf_;
};

} // namespace dytag::oracle
