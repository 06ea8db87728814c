#pragma once

#include <charconv>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/util/error.hpp"

namespace dytag::llm {

/// The reply could not be turned into the expected fields.
class ReplyParseError : public Error {
public:
    using Error::Error;
};

class MissingKeyError : public ReplyParseError {
public:
    explicit MissingKeyError(std::string key)
        : ReplyParseError("reply is missing key \"" + key + "\""), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class FieldTypeError : public ReplyParseError {
public:
    FieldTypeError(std::string key, const std::string& expected, const std::string& got)
        : ReplyParseError("reply key \"" + key + "\" should be " + expected + ", got " + got), key_(std::move(key))
    {
    }
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

enum class FieldType { string, integer, number, any };

struct FieldSpec {
    std::string name;
    FieldType type = FieldType::any;
};

struct AgentReply {
    nlohmann::json fields;   ///< expected keys only, coerced to their declared types
    nlohmann::json object;   ///< the whole extracted object
    std::string wrapper;     ///< key of the enclosing object the fields came from, if any
    bool extra_objects = false;
};

namespace detail {

/// End (one past the closing brace) of the balanced object opening at s[pos],
/// skipping braces inside string literals.
inline std::optional<std::size_t> balanced_end(std::string_view s, std::size_t pos)
{
    int depth = 0;
    bool in_string = false, escaped = false;
    for (std::size_t i = pos; i < s.size(); ++i) {
        const char c = s[i];
        if (in_string) {
            if (escaped)
                escaped = false;
            else if (c == '\\')
                escaped = true;
            else if (c == '"')
                in_string = false;
            continue;
        }
        if (c == '"')
            in_string = true;
        else if (c == '{')
            ++depth;
        else if (c == '}' && --depth == 0)
            return i + 1;
    }
    return std::nullopt;
}

/// First brace-balanced substring starting at or after `from` that parses as
/// a JSON object.
inline std::optional<std::pair<nlohmann::json, std::size_t>> next_object(std::string_view s, std::size_t from)
{
    for (auto pos = s.find('{', from); pos != std::string_view::npos; pos = s.find('{', pos + 1)) {
        auto end = balanced_end(s, pos);
        if (!end) continue;
        auto j = nlohmann::json::parse(s.substr(pos, *end - pos), nullptr, false);
        if (!j.is_discarded() && j.is_object()) return std::pair{std::move(j), *end};
    }
    return std::nullopt;
}

inline std::string type_name(const nlohmann::json& v)
{
    return v.type_name();
}

inline nlohmann::json coerce(const std::string& key, const nlohmann::json& v, FieldType t)
{
    switch (t) {
    case FieldType::any:
        return v;
    case FieldType::string:
        if (v.is_string()) return v;
        if (v.is_number()) return v.dump();
        throw FieldTypeError(key, "a string", type_name(v));
    case FieldType::integer: {
        if (v.is_number_integer()) return v;
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (std::isfinite(d) && d == std::floor(d)) return static_cast<std::int64_t>(d);
        }
        if (v.is_string()) {
            const auto& s = v.get_ref<const std::string&>();
            std::int64_t out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec == std::errc{} && p == s.data() + s.size()) return out;
        }
        throw FieldTypeError(key, "an integer", type_name(v) + " " + v.dump());
    }
    case FieldType::number: {
        if (v.is_number()) return v;
        if (v.is_string()) {
            const auto& s = v.get_ref<const std::string&>();
            double out = 0;
            auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
            if (ec == std::errc{} && p == s.data() + s.size()) return out;
        }
        throw FieldTypeError(key, "a number", type_name(v) + " " + v.dump());
    }
    }
    return v;
}

} // namespace detail

/// Extracts the first balanced JSON object from a model reply (prose and
/// code fences around it are ignored) and returns the expected fields. The
/// fields may sit at the top level or inside a single wrapper object such as
/// {"review": {...}}. Integers and numbers given as numeric strings, and
/// numbers where a string is expected, are converted.
inline AgentReply parse_agent_json(std::string_view reply, const std::vector<FieldSpec>& expected)
{
    auto first = detail::next_object(reply, 0);
    if (!first) throw ReplyParseError("reply contains no balanced JSON object");

    AgentReply out;
    out.object = std::move(first->first);
    if (detail::next_object(reply, first->second)) {
        out.extra_objects = true;
        spdlog::warn("reply contains more than one JSON object; using the first");
    }

    const nlohmann::json* scope = &out.object;
    auto has_all = [&](const nlohmann::json& o) {
        for (const auto& f : expected)
            if (!o.contains(f.name)) return false;
        return true;
    };
    if (!has_all(out.object)) {
        for (auto it = out.object.begin(); it != out.object.end(); ++it) {
            if (it.value().is_object() && (has_all(it.value()) || out.object.size() == 1)) {
                scope = &it.value();
                out.wrapper = it.key();
                break;
            }
        }
    }

    out.fields = nlohmann::json::object();
    for (const auto& f : expected) {
        if (!scope->contains(f.name)) throw MissingKeyError(f.name);
        out.fields[f.name] = detail::coerce(f.name, (*scope)[f.name], f.type);
    }
    return out;
}

} // namespace dytag::llm
