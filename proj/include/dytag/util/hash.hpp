#pragma once

#include <cstdint>
#include <string_view>

namespace dytag {

// Stable (platform-independent) hashing. std::hash is not stable across
// standard libraries, and every seeded stream in the project is keyed through
// these functions.

inline constexpr std::uint64_t fnv1a64(std::string_view s,
                                       std::uint64_t h = 0xcbf29ce484222325ULL) noexcept
{
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept
{
    return splitmix64(a ^ (splitmix64(b) + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

template <class... Rest>
constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b, Rest... rest) noexcept
{
    return hash_combine(hash_combine(a, b), static_cast<std::uint64_t>(rest)...);
}

} // namespace dytag
