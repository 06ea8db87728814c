#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace dytag {

/// Number of UTF-8 code points (continuation bytes are not counted).
inline std::size_t utf8_length(std::string_view s) noexcept
{
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

/// Longest prefix of at most `max_chars` code points.
inline std::string_view utf8_prefix(std::string_view s, std::size_t max_chars) noexcept
{
    std::size_t chars = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) {
            if (chars == max_chars) return s.substr(0, i);
            ++chars;
        }
    }
    return s;
}

/// Prefix of at most `max_chars` code points; an ellipsis marks a cut when it fits.
inline std::string excerpt(std::string_view s, std::size_t max_chars)
{
    if (utf8_length(s) <= max_chars) return std::string(s);
    if (max_chars < 4) return std::string(utf8_prefix(s, max_chars));
    return std::string(utf8_prefix(s, max_chars - 3)) + "...";
}

inline std::string_view trim(std::string_view s) noexcept
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

} // namespace dytag
