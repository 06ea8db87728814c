#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>
#include <vector>

#include "dytag/util/hash.hpp"

namespace dytag {

using Rng = std::mt19937_64;

/// Derives an independent generator for a labeled substream of the run seed,
/// e.g. substream(seed, "walks", round, slot). All randomness in the project
/// flows from one seed through this function.
template <class... Keys>
Rng substream(std::uint64_t seed, std::string_view label, Keys... keys)
{
    std::uint64_t h = hash_combine(splitmix64(seed), fnv1a64(label));
    ((h = hash_combine(h, static_cast<std::uint64_t>(keys))), ...);
    return Rng{h};
}

/// Uniform integer in [0, n). Lemire's multiply-shift with rejection; unlike
/// std::uniform_int_distribution the output is identical on every standard
/// library, which the determinism tests rely on.
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n)
{
    if (n == 0) return 0;
    std::uint64_t x = rng();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            x = rng();
            m = static_cast<unsigned __int128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Draws k distinct indices from [0, n) (partial Fisher-Yates). Returns all of
/// [0, n) shuffled when k >= n.
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t k)
{
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    const std::size_t take = k < n ? k : n;
    for (std::size_t i = 0; i < take; ++i) {
        const auto j = i + static_cast<std::size_t>(uniform_index(rng, n - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(take);
    return idx;
}

/// Standard normal value addressed by a 64-bit counter key. Pure function of
/// the key, so a projection column can be regenerated on demand.
inline double counter_normal(std::uint64_t key) noexcept
{
    const std::uint64_t a = splitmix64(key);
    const std::uint64_t b = splitmix64(a ^ 0xd1b54a32d192ed03ULL);
    // u1 in (0,1], u2 in [0,1)
    const double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(b >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace dytag
