#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <spdlog/spdlog.h>

#include "dytag/util/error.hpp"

namespace dytag::llm {

class TemplateError : public Error {
public:
    using Error::Error;
};

using SlotMap = std::map<std::string, std::string, std::less<>>;

/// Text with {slot} placeholders. A placeholder is a brace pair around a
/// lowercase identifier; any other brace (JSON examples) is literal.
struct PromptTemplate {
    std::string id;
    std::string text;

    /// Placeholders in order of first appearance.
    std::vector<std::string> slots() const;
};

namespace detail {

inline bool slot_char(char c, bool first)
{
    return (c >= 'a' && c <= 'z') || c == '_' || (!first && c >= '0' && c <= '9');
}

/// Calls on_text(literal) and on_slot(name) in document order.
template <class Text, class Slot>
void scan_template(std::string_view t, Text&& on_text, Slot&& on_slot)
{
    std::size_t lit = 0, i = 0;
    while ((i = t.find('{', i)) != std::string_view::npos) {
        std::size_t j = i + 1;
        while (j < t.size() && slot_char(t[j], j == i + 1)) ++j;
        if (j > i + 1 && j < t.size() && t[j] == '}') {
            on_text(t.substr(lit, i - lit));
            on_slot(t.substr(i + 1, j - i - 1));
            lit = i = j + 1;
        } else {
            ++i;
        }
    }
    on_text(t.substr(lit));
}

} // namespace detail

inline std::vector<std::string> PromptTemplate::slots() const
{
    std::vector<std::string> out;
    std::set<std::string, std::less<>> seen;
    detail::scan_template(text, [](std::string_view) {}, [&](std::string_view s) {
        if (seen.emplace(s).second) out.emplace_back(s);
    });
    return out;
}

/// Fills every placeholder. A placeholder without a value is an error;
/// supplied values the template does not use are reported and ignored.
inline std::string render_template(const PromptTemplate& t, const SlotMap& values,
                                   std::vector<std::string>* warnings = nullptr)
{
    std::string out;
    out.reserve(t.text.size());
    std::set<std::string, std::less<>> used;
    detail::scan_template(t.text, [&](std::string_view s) { out.append(s); }, [&](std::string_view s) {
        auto it = values.find(s);
        if (it == values.end()) throw TemplateError("template \"" + t.id + "\": slot {" + std::string(s) + "} not filled");
        used.emplace(s);
        out.append(it->second);
    });
    for (const auto& [k, v] : values) {
        if (used.contains(k)) continue;
        const auto msg = "template \"" + t.id + "\": ignoring unknown slot {" + k + "}";
        spdlog::warn("{}", msg);
        if (warnings) warnings->push_back(msg);
    }
    return out;
}

/// Fills only the given placeholders and leaves the rest in place, e.g. to
/// bind dataset descriptors into a generic template.
inline PromptTemplate specialize(const PromptTemplate& t, const SlotMap& values, std::string new_id = {})
{
    std::string out;
    detail::scan_template(t.text, [&](std::string_view s) { out.append(s); }, [&](std::string_view s) {
        auto it = values.find(s);
        if (it == values.end())
            out.append("{").append(s).append("}");
        else
            out.append(it->second);
    });
    return {new_id.empty() ? t.id : std::move(new_id), std::move(out)};
}

} // namespace dytag::llm
