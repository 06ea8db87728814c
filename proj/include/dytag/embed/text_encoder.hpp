#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dytag/core/graph.hpp"
#include "dytag/util/error.hpp"
#include "dytag/util/hash.hpp"

namespace dytag {

/// Maps text to a fixed-length feature vector. Implementations must be
/// deterministic and map "" to the zero vector.
class TextEncoder {
public:
    virtual ~TextEncoder() = default;
    virtual std::string name() const = 0;
    virtual std::size_t dim() const = 0;
    virtual std::vector<double> encode(std::string_view text) const = 0;
};

namespace detail {

/// Decodes one UTF-8 code point starting at s[i], advancing i. Invalid bytes
/// decode as U+FFFD.
inline char32_t next_code_point(std::string_view s, std::size_t& i)
{
    const auto b0 = static_cast<unsigned char>(s[i++]);
    if (b0 < 0x80) return b0;
    int extra = b0 >= 0xF0 ? 3 : b0 >= 0xE0 ? 2 : b0 >= 0xC0 ? 1 : -1;
    if (extra < 0) return 0xFFFD;
    char32_t cp = b0 & (0x3F >> extra);
    for (int k = 0; k < extra; ++k) {
        if (i >= s.size() || (static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) return 0xFFFD;
        cp = (cp << 6) | (static_cast<unsigned char>(s[i++]) & 0x3F);
    }
    return cp;
}

inline bool is_ideographic(char32_t c)
{
    return (c >= 0x3040 && c <= 0x30FF)     // kana
           || (c >= 0x3400 && c <= 0x4DBF)  // CJK ext A
           || (c >= 0x4E00 && c <= 0x9FFF)  // CJK unified
           || (c >= 0xAC00 && c <= 0xD7AF)  // Hangul syllables
           || (c >= 0xF900 && c <= 0xFAFF)  // compatibility ideographs
           || (c >= 0x20000 && c <= 0x2FFFF);
}

inline bool is_separator(char32_t c)
{
    if (c < 0x80) return !((c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'));
    return c == 0xFFFD || (c >= 0x80 && c <= 0xBF) || c == 0xD7 || c == 0xF7 // Latin-1 punctuation/symbols
           || (c >= 0x2000 && c <= 0x2BFF)                                    // punctuation, symbols, arrows
           || (c >= 0x3000 && c <= 0x303F)                                    // CJK punctuation
           || (c >= 0xFE30 && c <= 0xFE4F) || (c >= 0xFF00 && c <= 0xFF0F)
           || (c >= 0xFF1A && c <= 0xFF20) || (c >= 0xFF3B && c <= 0xFF40) || (c >= 0xFF5B && c <= 0xFF65)
           || (c >= 0x1F000 && c <= 0x1FAFF); // emoji
}

} // namespace detail

/// Word tokens: maximal runs of letters/digits, ASCII lowercased. Each
/// ideographic character (CJK, kana, Hangul) is a token of its own.
inline std::vector<std::string> tokenize(std::string_view text)
{
    std::vector<std::string> tokens;
    std::string cur;
    auto flush = [&] {
        if (!cur.empty()) tokens.push_back(std::move(cur));
        cur.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const std::size_t start = i;
        const char32_t c = detail::next_code_point(text, i);
        if (detail::is_separator(c)) {
            flush();
        } else if (detail::is_ideographic(c)) {
            flush();
            tokens.emplace_back(text.substr(start, i - start));
        } else if (c < 0x80) {
            cur.push_back(static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c));
        } else {
            cur.append(text.substr(start, i - start));
        }
    }
    flush();
    return tokens;
}

/// Feature-hashing encoder: token counts scattered into `dim` signed buckets,
/// then L2-normalized.
class HashedTextEncoder final : public TextEncoder {
public:
    explicit HashedTextEncoder(std::size_t dim = 256, std::uint64_t seed = 0x7e47'e4c0'de00'0001ULL)
        : dim_(dim), seed_(seed)
    {
        if (dim == 0) throw InvalidArgument("HashedTextEncoder: dim must be >= 1");
    }

    std::string name() const override { return "hashed-" + std::to_string(dim_); }
    std::size_t dim() const override { return dim_; }

    std::vector<double> encode(std::string_view text) const override
    {
        std::vector<double> v(dim_, 0.0);
        for (const auto& tok : tokenize(text)) {
            const std::uint64_t h = fnv1a64(tok, seed_);
            const std::uint64_t mixed = splitmix64(h);
            v[h % dim_] += (mixed >> 63) ? -1.0 : 1.0;
        }
        double norm = 0.0;
        for (double x : v) norm += x * x;
        if (norm > 0.0) {
            norm = std::sqrt(norm);
            for (double& x : v) x /= norm;
        }
        return v;
    }

private:
    std::size_t dim_;
    std::uint64_t seed_;
};

/// Precomputed node feature vectors (node_id -> vector), e.g. exported
/// transformer embeddings. Consulted before the text encoder for node texts.
class PrecomputedNodeVectors {
public:
    PrecomputedNodeVectors() = default;

    void insert(std::string node_id, std::vector<double> v)
    {
        if (dim_ == 0) dim_ = v.size();
        if (v.size() != dim_)
            throw InvalidArgument("precomputed vector for \"" + node_id + "\" has length " + std::to_string(v.size())
                                  + ", expected " + std::to_string(dim_));
        vectors_[std::move(node_id)] = std::move(v);
    }

    const std::vector<double>* find(std::string_view node_id) const
    {
        auto it = vectors_.find(std::string(node_id));
        return it == vectors_.end() ? nullptr : &it->second;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return vectors_.size(); }

    /// Line-delimited JSON {"node_id": ..., "vector": [...]}.
    static PrecomputedNodeVectors load_jsonl(const std::filesystem::path& path)
    {
        std::ifstream in(path);
        if (!in) throw Error("embedding file not found: " + path.string());
        PrecomputedNodeVectors out;
        std::string line;
        std::size_t row = 0;
        while (std::getline(in, line)) {
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ++row;
            try {
                auto j = nlohmann::json::parse(line);
                out.insert(j.at("node_id").get<std::string>(), j.at("vector").get<std::vector<double>>());
            } catch (const nlohmann::json::exception& e) {
                throw ParseError(row, std::string("embedding record: ") + e.what());
            }
        }
        return out;
    }

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> vectors_;
};

} // namespace dytag
