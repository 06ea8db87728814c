#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "dytag/core/graph.hpp"
#include "dytag/gen/config.hpp"
#include "dytag/util/rng.hpp"
#include "dytag/util/text.hpp"

namespace dytag {

/// Per-node incident edge lists (time order) and total degrees for one
/// snapshot of a graph.
struct GraphIndex {
    std::vector<std::vector<std::size_t>> incident;
    std::vector<std::size_t> degree;

    explicit GraphIndex(const DyTag& g) : incident(g.num_nodes()), degree(g.num_nodes(), 0)
    {
        for (std::size_t e = 0; e < g.num_edges(); ++e) {
            const auto& edge = g.edges()[e];
            const auto s = *g.index_of(edge.src), d = *g.index_of(edge.dst);
            incident[s].push_back(e);
            if (d != s) incident[d].push_back(e);
            ++degree[s];
            ++degree[d];
        }
    }
};

struct MemoryEntry {
    Timestamp timestamp;
    std::string counterpart;
    std::string counterpart_excerpt;
    std::string label;
    std::string text;

    std::string serialize() const
    {
        std::string s = "time " + timestamp.to_string() + ": " + counterpart;
        if (!counterpart_excerpt.empty()) s += " (" + counterpart_excerpt + ")";
        s += " [" + label + "] " + text + "\n";
        return s;
    }

    friend bool operator==(const MemoryEntry&, const MemoryEntry&) = default;
};

struct NodeMemory {
    std::string node_id;
    std::vector<MemoryEntry> entries; ///< walk order
    std::optional<std::string> reflected_summary;

    std::string serialize() const
    {
        std::string s;
        for (const auto& e : entries) s += e.serialize();
        return s;
    }

    std::size_t serialized_chars() const
    {
        std::size_t n = 0;
        for (const auto& e : entries) n += utf8_length(e.serialize());
        return n;
    }

    std::optional<Timestamp> latest() const
    {
        std::optional<Timestamp> t;
        for (const auto& e : entries)
            if (!t || *t < e.timestamp) t = e.timestamp;
        return t;
    }

    /// Entries ordered newest first (ties keep walk order).
    std::vector<const MemoryEntry*> newest_first() const
    {
        std::vector<const MemoryEntry*> out;
        for (const auto& e : entries) out.push_back(&e);
        std::stable_sort(out.begin(), out.end(),
                         [](const MemoryEntry* a, const MemoryEntry* b) { return b->timestamp < a->timestamp; });
        return out;
    }

    /// What a prompt shows: the reflected summary when present, else the entries.
    std::string prompt_text() const
    {
        if (reflected_summary && !reflected_summary->empty()) return *reflected_summary;
        const auto s = serialize();
        return s.empty() ? "(no history)" : s;
    }
};

inline constexpr std::size_t kCounterpartExcerptChars = 80;

/// Drops the oldest entries until the serialized memory fits `cap`
/// characters; a lone oversized entry has its text shortened.
inline void truncate_memory(NodeMemory& m, std::size_t cap)
{
    while (m.serialized_chars() > cap && m.entries.size() > 1) {
        auto oldest = std::min_element(m.entries.begin(), m.entries.end(),
                                       [](const MemoryEntry& a, const MemoryEntry& b) { return a.timestamp < b.timestamp; });
        m.entries.erase(oldest);
    }
    if (m.entries.size() == 1 && m.serialized_chars() > cap) {
        auto& e = m.entries.front();
        e.counterpart_excerpt.clear();
        const std::size_t overhead = utf8_length(e.serialize()) - utf8_length(e.text);
        if (overhead >= cap)
            m.entries.clear();
        else
            e.text = std::string(utf8_prefix(e.text, cap - overhead));
    }
}

/// Memory of `node_id` from `cfg.walks` random walks of `cfg.walk_len` steps.
/// Each step follows a uniformly chosen incident edge and records it; records
/// are deduplicated by (counterpart, timestamp) in walk order, then evicted
/// oldest-first to the character cap.
inline NodeMemory build_memory(const DyTag& g, const GraphIndex& index, std::string_view node_id,
                               const GenConfig& cfg, Rng& rng)
{
    NodeMemory m;
    m.node_id = std::string(node_id);
    const auto owner = g.index_of(node_id);
    if (!owner) throw InvalidArgument("build_memory: unknown node " + std::string(node_id));

    std::set<std::pair<std::string, Timestamp>> seen;
    for (std::size_t w = 0; w < cfg.walks; ++w) {
        std::size_t cur = *owner;
        for (std::size_t step = 0; step < cfg.walk_len; ++step) {
            const auto& inc = index.incident[cur];
            if (inc.empty()) break;
            const auto& e = g.edges()[inc[uniform_index(rng, inc.size())]];
            const bool touches_owner = e.src == node_id || e.dst == node_id;
            const std::string& counterpart = touches_owner ? (e.src == node_id ? e.dst : e.src) : e.dst;
            if (seen.emplace(counterpart, e.timestamp).second) {
                m.entries.push_back({e.timestamp, counterpart,
                                     excerpt(g.node(counterpart).text, kCounterpartExcerptChars), e.label, e.text});
            }
            const auto& here = g.nodes()[cur].node_id;
            cur = *g.index_of(e.src == here ? e.dst : e.src);
        }
    }
    truncate_memory(m, cfg.memory_cap_chars);
    return m;
}

inline NodeMemory build_memory(const DyTag& g, std::string_view node_id, const GenConfig& cfg, Rng& rng)
{
    return build_memory(g, GraphIndex(g), node_id, cfg, rng);
}

} // namespace dytag
