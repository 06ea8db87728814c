#pragma once

#include <atomic>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/core/graph.hpp"
#include "dytag/gen/memory.hpp"
#include "dytag/util/rng.hpp"
#include "dytag/util/text.hpp"

namespace dytag {

struct SelectionContext {
    const DyTag& graph;                       ///< pre-round snapshot
    const NodeRecord& source;
    const NodeMemory& memory;
    std::span<const std::string> candidates;  ///< recall list, rank order
    Timestamp base_time;                      ///< earliest admissible timestamp for this agent
    double median_gap = 1.0;                  ///< median inter-event gap of the seed stream
    std::size_t round = 0;
    std::size_t slot = 0;
    std::size_t attempt = 0;
    std::uint64_t seed = 0;
};

struct AgentAction {
    std::string chosen_dst;
    std::optional<Timestamp> timestamp;       ///< absent when the policy gave no usable time
    std::string label;
    std::string edge_text;
    std::size_t confidence_rank = 0;          ///< position of chosen_dst in the recall list
};

struct NodeContext {
    const DyTag& graph;
    NodeRole role;                            ///< role of the node to create
    bool source_side = true;                  ///< counts against r_src (else r_dst)
    std::vector<const NodeRecord*> recent;    ///< recently active nodes on the same side
    std::size_t round = 0;
    std::size_t slot = 0;
    std::uint64_t seed = 0;
};

/// Decision component behind every agent. Must be callable concurrently.
class AgentPolicy {
public:
    virtual ~AgentPolicy() = default;
    virtual std::string name() const = 0;
    virtual AgentAction select_destination(const SelectionContext& ctx) = 0;
    /// The engine assigns the id when the returned one is empty or taken.
    virtual NodeRecord generate_node(const NodeContext& ctx) = 0;
    virtual std::string reflect(const NodeMemory& memory) = 0;
    virtual nlohmann::json stats() const { return nlohmann::json::object(); }
};

namespace detail {

inline std::vector<std::string> split_words(std::string_view s)
{
    std::vector<std::string> out;
    std::istringstream in{std::string(s)};
    for (std::string w; in >> w;) out.push_back(std::move(w));
    return out;
}

/// Default time for a policy: base + gap * (slot + 1), so agents of one round
/// spread out like the seed stream.
inline Timestamp spread_time(const SelectionContext& ctx)
{
    return ctx.base_time.plus(ctx.median_gap * static_cast<double>(ctx.slot + 1));
}

inline std::string sample_label(const SelectionContext& ctx, Rng& rng)
{
    if (!ctx.memory.entries.empty())
        return ctx.memory.entries[uniform_index(rng, ctx.memory.entries.size())].label;
    if (ctx.graph.num_edges() > 0) return ctx.graph.edges()[uniform_index(rng, ctx.graph.num_edges())].label;
    return "";
}

inline std::string templated_text(const SelectionContext& ctx, const std::string& dst, Rng& rng)
{
    if (!ctx.memory.entries.empty()) {
        const auto& borrowed = ctx.memory.entries[uniform_index(rng, ctx.memory.entries.size())].text;
        if (!borrowed.empty()) return borrowed;
    }
    const auto* node = ctx.graph.contains(dst) ? &ctx.graph.node(dst) : nullptr;
    return "interaction with " + dst + (node && !node->text.empty() ? ": " + excerpt(node->text, 80) : "");
}

/// New node text spliced from two recent examples: the first half of one
/// example's words followed by the second half of another's.
inline std::string spliced_text(const NodeContext& ctx, Rng& rng)
{
    if (ctx.recent.empty()) return "generated node";
    const auto& a = ctx.recent[uniform_index(rng, ctx.recent.size())]->text;
    const auto& b = ctx.recent[uniform_index(rng, ctx.recent.size())]->text;
    const auto wa = split_words(a), wb = split_words(b);
    std::string out;
    for (std::size_t i = 0; i < (wa.size() + 1) / 2; ++i) out += (out.empty() ? "" : " ") + wa[i];
    for (std::size_t i = wb.size() / 2; i < wb.size(); ++i) out += (out.empty() ? "" : " ") + wb[i];
    return out.empty() ? "generated node" : out;
}

inline std::string stub_reflection(const NodeMemory& m)
{
    std::string out;
    const auto newest = m.newest_first();
    for (std::size_t i = 0; i < newest.size() && i < 3; ++i) out += (i ? ", " : "") + newest[i]->label;
    return out;
}

} // namespace detail

/// Picks the most recent prior destination if it was recalled, else recall
/// rank 1 (the recall list puts history first, so both are rank 1). The label
/// is drawn from the source's remembered labels and the text is borrowed
/// from its memory.
class RecencyPolicy final : public AgentPolicy {
public:
    std::string name() const override { return "stub-recency"; }

    AgentAction select_destination(const SelectionContext& ctx) override
    {
        auto rng = substream(ctx.seed, "recency-policy", ctx.round, ctx.slot, ctx.attempt);
        AgentAction a;
        a.chosen_dst = ctx.candidates.front();
        a.confidence_rank = 0;
        a.timestamp = detail::spread_time(ctx);
        a.label = detail::sample_label(ctx, rng);
        a.edge_text = detail::templated_text(ctx, a.chosen_dst, rng);
        return a;
    }

    NodeRecord generate_node(const NodeContext& ctx) override
    {
        auto rng = substream(ctx.seed, "recency-node", ctx.round, ctx.slot, ctx.source_side);
        return {"", ctx.role, detail::spliced_text(ctx, rng), NodeOrigin::generated};
    }

    std::string reflect(const NodeMemory& m) override { return detail::stub_reflection(m); }
};

/// Uniform choice over the recall list; labels and text as RecencyPolicy.
class UniformPolicy final : public AgentPolicy {
public:
    std::string name() const override { return "stub-uniform"; }

    AgentAction select_destination(const SelectionContext& ctx) override
    {
        auto rng = substream(ctx.seed, "uniform-policy", ctx.round, ctx.slot, ctx.attempt);
        AgentAction a;
        a.confidence_rank = uniform_index(rng, ctx.candidates.size());
        a.chosen_dst = ctx.candidates[a.confidence_rank];
        a.timestamp = detail::spread_time(ctx);
        a.label = detail::sample_label(ctx, rng);
        a.edge_text = detail::templated_text(ctx, a.chosen_dst, rng);
        return a;
    }

    NodeRecord generate_node(const NodeContext& ctx) override
    {
        auto rng = substream(ctx.seed, "uniform-node", ctx.round, ctx.slot, ctx.source_side);
        return {"", ctx.role, detail::spliced_text(ctx, rng), NodeOrigin::generated};
    }

    std::string reflect(const NodeMemory& m) override { return detail::stub_reflection(m); }
};

/// Stores the policy's summary of a nonempty memory, cut to `cap` characters.
/// A failing policy leaves the memory unreflected and returns false.
inline bool reflect_memory(AgentPolicy& policy, NodeMemory& memory, std::size_t cap)
{
    if (memory.entries.empty()) {
        memory.reflected_summary = std::string();
        return true;
    }
    try {
        memory.reflected_summary = std::string(utf8_prefix(policy.reflect(memory), cap));
        return true;
    } catch (const std::exception& e) {
        spdlog::warn("reflection failed for {}: {}; using raw memory", memory.node_id, e.what());
        memory.reflected_summary.reset();
        return false;
    }
}

} // namespace dytag
