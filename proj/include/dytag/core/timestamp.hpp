#pragma once

#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <system_error>

namespace dytag {

/// Dataset-native time value. Integral columns (day counts, epoch seconds)
/// keep exact 64-bit integers; anything else is a double. Ordering and
/// equality are numeric across both representations.
class Timestamp {
public:
    constexpr Timestamp() = default;
    constexpr Timestamp(std::int64_t v) noexcept : int_(v), integral_(true) {}
    constexpr Timestamp(double v) noexcept : real_(v), integral_(false) {}

    constexpr bool integral() const noexcept { return integral_; }
    constexpr std::int64_t as_int() const noexcept
    {
        return integral_ ? int_ : static_cast<std::int64_t>(real_);
    }
    constexpr double as_double() const noexcept
    {
        return integral_ ? static_cast<double>(int_) : real_;
    }

    friend constexpr std::partial_ordering operator<=>(const Timestamp& a, const Timestamp& b) noexcept
    {
        if (a.integral_ && b.integral_) return a.int_ <=> b.int_;
        return a.as_double() <=> b.as_double();
    }
    friend constexpr bool operator==(const Timestamp& a, const Timestamp& b) noexcept
    {
        return (a <=> b) == std::partial_ordering::equivalent;
    }

    /// Shifts by a delta of the same kind; an integral timestamp rounds a real delta.
    Timestamp plus(double delta) const noexcept
    {
        if (integral_) return Timestamp{int_ + static_cast<std::int64_t>(delta + (delta >= 0 ? 0.5 : -0.5))};
        return Timestamp{real_ + delta};
    }

    /// Shortest representation that parses back to the same value.
    std::string to_string() const
    {
        char buf[32];
        auto res = integral_ ? std::to_chars(buf, buf + sizeof buf, int_)
                             : std::to_chars(buf, buf + sizeof buf, real_);
        return std::string(buf, res.ptr);
    }

    /// Parses an integer literal exactly, otherwise a decimal. Returns nullopt
    /// on anything that is not a complete number.
    static std::optional<Timestamp> parse(std::string_view s)
    {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
        if (s.empty()) return std::nullopt;
        std::string_view body = s;
        if (body.front() == '+') body.remove_prefix(1);

        std::int64_t i{};
        auto ri = std::from_chars(body.data(), body.data() + body.size(), i);
        if (ri.ec == std::errc{} && ri.ptr == body.data() + body.size()) return Timestamp{i};

        double d{};
        auto rd = std::from_chars(body.data(), body.data() + body.size(), d);
        if (rd.ec == std::errc{} && rd.ptr == body.data() + body.size()) return Timestamp{d};
        return std::nullopt;
    }

private:
    std::int64_t int_ = 0;
    double real_ = 0.0;
    bool integral_ = true;
};

} // namespace dytag
