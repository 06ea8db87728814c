#pragma once

#include <algorithm>
#include <cmath>
#include <iterator>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "dytag/util/error.hpp"

namespace dytag {

struct PowerLawFit {
    double alpha = 0.0;       ///< exponent, > 1
    double d_k = 0.0;         ///< KS distance over k >= k_min, in [0, 1]
    std::int64_t k_min = 2;
    std::size_t n_tail = 0;   ///< samples >= k_min
};

/// D_k < 0.15 and 2 <= alpha <= 3, no tolerance.
inline constexpr double kPowerLawMaxKs = 0.15;
inline constexpr double kPowerLawAlphaLow = 2.0;
inline constexpr double kPowerLawAlphaHigh = 3.0;

inline bool power_law_validity(const PowerLawFit& fit) noexcept
{
    return fit.d_k < kPowerLawMaxKs && fit.alpha >= kPowerLawAlphaLow && fit.alpha <= kPowerLawAlphaHigh;
}

/// Hurwitz zeta sum_{k>=0} (k + q)^-s for s > 1, q > 0.
inline double hurwitz_zeta(double s, double q)
{
    static const bool handler_off = [] {
        gsl_set_error_handler_off();
        return true;
    }();
    (void)handler_off;
    gsl_sf_result r;
    const int status = gsl_sf_hzeta_e(s, q, &r);
    if (status != GSL_SUCCESS && status != GSL_EUNDRFLW)
        throw NumericError("hurwitz_zeta(" + std::to_string(s) + ", " + std::to_string(q)
                           + ") failed: " + gsl_strerror(status));
    return r.val;
}

/// CDF of the discrete power law p(k) = k^-alpha / zeta(alpha, k_min) on k >= k_min.
inline double discrete_power_law_cdf(std::int64_t k, double alpha, std::int64_t k_min)
{
    if (k < k_min) return 0.0;
    return 1.0 - hurwitz_zeta(alpha, static_cast<double>(k + 1)) / hurwitz_zeta(alpha, static_cast<double>(k_min));
}

/// Closed-form continuous approximation 1 + n / sum ln(k / (k_min - 0.5)).
/// Biased low for small k_min; used to seed the exact fit.
inline double approximate_power_law_alpha(std::span<const std::int64_t> tail, std::int64_t k_min)
{
    double s = 0.0;
    for (auto k : tail) s += std::log(static_cast<double>(k) / (static_cast<double>(k_min) - 0.5));
    return 1.0 + static_cast<double>(tail.size()) / s;
}

/// Discrete power-law fit to a tail histogram (value -> multiplicity; entries
/// below k_min are ignored). alpha maximizes the exact discrete likelihood
/// -alpha * sum ln k - n ln zeta(alpha, k_min); d_k is the largest gap between
/// the empirical tail CDF and the fitted CDF over k >= k_min.
inline PowerLawFit fit_power_law_histogram(const std::map<std::int64_t, double>& histogram, std::int64_t k_min = 2)
{
    if (k_min < 1) throw InvalidArgument("fit_power_law: k_min must be positive");
    auto first = histogram.lower_bound(k_min);
    double n = 0.0, sum_log = 0.0;
    for (auto it = first; it != histogram.end(); ++it) {
        if (it->second < 0) throw InvalidArgument("fit_power_law: negative multiplicity");
        n += it->second;
        sum_log += it->second * std::log(static_cast<double>(it->first));
    }
    if (n < 2) throw NumericError("fit_power_law: fewer than 2 samples >= k_min");
    if (std::next(first) == histogram.end() && first->first == k_min)
        throw NumericError("fit_power_law: degenerate tail (all samples equal k_min)");
    const double mean_log = sum_log / n;

    const double q = static_cast<double>(k_min);
    auto neg_loglik = [&](double a) { return a * mean_log + std::log(hurwitz_zeta(a, q)); };
    const auto [alpha, best] = boost::math::tools::brent_find_minima(neg_loglik, 1.0 + 1e-6, 50.0,
                                                                      std::numeric_limits<double>::digits / 2);
    (void)best;

    // Both CDFs are step functions on the integers and F is flat between
    // observed values, so the sup is attained at an observed value or just
    // before the next one.
    const double z_min = hurwitz_zeta(alpha, q);
    auto H = [&](std::int64_t k) { return 1.0 - hurwitz_zeta(alpha, static_cast<double>(k + 1)) / z_min; };
    double d_k = 0.0, cum = 0.0;
    std::int64_t prev = k_min - 1;
    for (auto it = first; it != histogram.end(); ++it) {
        const auto k = it->first;
        if (k - 1 > prev) d_k = std::max(d_k, std::abs(cum / n - H(k - 1)));
        cum += it->second;
        d_k = std::max(d_k, std::abs(cum / n - H(k)));
        prev = k;
    }
    return PowerLawFit{alpha, std::min(d_k, 1.0), k_min, static_cast<std::size_t>(std::llround(n))};
}

/// Fit to the samples >= k_min of a degree list.
template <class Int>
PowerLawFit fit_power_law(std::span<const Int> degrees, std::int64_t k_min = 2)
{
    std::map<std::int64_t, double> hist;
    for (auto d : degrees) {
        const auto k = static_cast<std::int64_t>(d);
        if (k >= k_min) hist[k] += 1.0;
    }
    return fit_power_law_histogram(hist, k_min);
}

template <class Int>
PowerLawFit fit_power_law(const std::vector<Int>& degrees, std::int64_t k_min = 2)
{
    return fit_power_law(std::span<const Int>(degrees), k_min);
}

} // namespace dytag
