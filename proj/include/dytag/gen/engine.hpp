#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <unordered_set>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/core/graph.hpp"
#include "dytag/gen/config.hpp"
#include "dytag/gen/memory.hpp"
#include "dytag/gen/policy.hpp"
#include "dytag/gen/recall.hpp"
#include "dytag/util/error.hpp"
#include "dytag/util/hash.hpp"
#include "dytag/util/parallel.hpp"
#include "dytag/util/rng.hpp"

namespace dytag {

class GenerationError : public Error {
public:
    using Error::Error;
};

/// Candidate list shown to the agent that produced a generated edge.
struct RecallLog {
    std::size_t edge_index = 0; ///< position of the edge in the output stream
    std::string src;
    std::string chosen;
    std::vector<std::string> candidates;
    std::size_t round = 0;
    std::size_t slot = 0;

    nlohmann::json to_json() const
    {
        return {{"edge_index", edge_index}, {"src", src},     {"chosen", chosen},
                {"candidates", candidates}, {"round", round}, {"slot", slot}};
    }
    static RecallLog from_json(const nlohmann::json& j)
    {
        return {j.at("edge_index").get<std::size_t>(), j.at("src").get<std::string>(), j.at("chosen").get<std::string>(),
                j.at("candidates").get<std::vector<std::string>>(), j.value("round", std::size_t{0}),
                j.value("slot", std::size_t{0})};
    }
};

struct GenResult {
    DyTag graph;
    std::vector<RecallLog> recall_logs;
    nlohmann::json manifest;
    bool ok = true;
    std::string error;
    std::size_t rounds_completed = 0;
    std::vector<double> round_ms; ///< wall time per completed round; kept out of the manifest so it stays reproducible
};

struct NodeRates {
    std::size_t r_src = 1;
    std::size_t r_dst = 1;
    friend bool operator==(const NodeRates&, const NodeRates&) = default;
};

/// Mean number of nodes making their first appearance per block of S seed
/// edges, rounded and floored at 1. A node first seen as an edge's source
/// counts toward r_src, one first seen as a destination toward r_dst. Only
/// full blocks are averaged unless the stream is shorter than one block.
inline NodeRates derive_node_rates(const DyTag& seed, std::size_t S)
{
    if (S == 0) throw InvalidArgument("derive_node_rates: S must be >= 1");
    if (seed.num_edges() == 0) throw InvalidArgument("derive_node_rates: seed graph has no edges");
    const std::size_t blocks = std::max<std::size_t>(1, seed.num_edges() / S);
    const std::size_t limit = std::min(seed.num_edges(), blocks * S);
    std::unordered_set<std::string_view> seen;
    double new_src = 0, new_dst = 0;
    for (std::size_t i = 0; i < limit; ++i) {
        const auto& e = seed.edges()[i];
        if (seen.insert(e.src).second) ++new_src;
        if (seen.insert(e.dst).second) ++new_dst;
    }
    auto rate = [&](double total) {
        return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(total / static_cast<double>(blocks))));
    };
    return {rate(new_src), rate(new_dst)};
}

/// Median gap between consecutive timestamps; 1 for streams of < 2 edges.
inline double median_gap(const DyTag& g)
{
    if (g.num_edges() < 2) return 1.0;
    std::vector<double> gaps;
    gaps.reserve(g.num_edges() - 1);
    for (std::size_t i = 1; i < g.num_edges(); ++i)
        gaps.push_back(g.edges()[i].timestamp.as_double() - g.edges()[i - 1].timestamp.as_double());
    std::sort(gaps.begin(), gaps.end());
    const auto n = gaps.size();
    return n % 2 ? gaps[n / 2] : 0.5 * (gaps[n / 2 - 1] + gaps[n / 2]);
}

namespace detail {

inline Timestamp match_kind(Timestamp t, bool integral)
{
    if (integral && !t.integral()) return Timestamp{static_cast<std::int64_t>(std::llround(t.as_double()))};
    if (!integral && t.integral()) return Timestamp{t.as_double()};
    return t;
}

struct SlotOutcome {
    TemporalEdge edge;
    std::vector<std::string> candidates;
    std::size_t rank = 0;
    bool clamped = false;
    std::size_t invalid = 0;
};

class Generator {
public:
    Generator(DyTag graph, const GenConfig& cfg, AgentPolicy& policy)
        : graph_(std::move(graph)), cfg_(cfg), policy_(policy)
    {
        integral_ = graph_.num_edges() == 0 || graph_.edges().front().timestamp.integral();
        for (const auto& e : graph_.edges()) allow_self_ |= e.src == e.dst;
    }

    DyTag& graph() { return graph_; }
    std::vector<double>& round_ms() { return round_ms_; }
    void set_median_gap(double g) { gap_ = g; }
    double gap() const { return gap_; }
    bool allow_self() const { return allow_self_; }

    void add_to_pool(const std::string& id)
    {
        if (pool_set_.insert(id).second) pool_.push_back(id);
    }
    std::size_t pool_size() const { return pool_.size(); }

    /// One atomic round: every agent sees the pre-round graph; the edges are
    /// committed together in (timestamp, source id, recall rank, slot) order.
    nlohmann::json run_round(std::size_t round, const std::vector<std::string>& sources,
                             std::vector<RecallLog>& logs)
    {
        const auto t0 = std::chrono::steady_clock::now();
        const GraphIndex index(graph_);
        const std::optional<Timestamp> round_start =
            graph_.num_edges() ? std::optional<Timestamp>(graph_.edges().back().timestamp) : std::nullopt;

        // Memories for each distinct source, keyed by (round, node id).
        std::vector<std::string> distinct(sources.begin(), sources.end());
        std::sort(distinct.begin(), distinct.end());
        distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
        std::vector<NodeMemory> memories(distinct.size());
        std::vector<char> reflect_failed(distinct.size(), 0);
        parallel_for(distinct.size(), cfg_.jobs, [&](std::size_t i) {
            auto rng = substream(cfg_.rng_seed, "memory", round, fnv1a64(distinct[i]));
            memories[i] = build_memory(graph_, index, distinct[i], cfg_, rng);
            if (cfg_.reflection && !reflect_memory(policy_, memories[i], cfg_.memory_cap_chars)) reflect_failed[i] = 1;
        });
        auto memory_of = [&](const std::string& id) -> const NodeMemory& {
            return memories[std::lower_bound(distinct.begin(), distinct.end(), id) - distinct.begin()];
        };

        const RecallOptions ropts{graph_.bipartite() || !allow_self_};
        std::vector<SlotOutcome> out(sources.size());
        parallel_for(sources.size(), cfg_.jobs, [&](std::size_t slot) {
            const auto& src = sources[slot];
            const auto& memory = memory_of(src);
            const auto& inc = index.incident[*graph_.index_of(src)];
            std::optional<Timestamp> base = round_start;
            if (!inc.empty()) {
                const auto latest = graph_.edges()[inc.back()].timestamp;
                if (!base || *base < latest) base = latest;
            }
            const Timestamp base_time = base.value_or(Timestamp{std::int64_t{0}});

            auto rng = substream(cfg_.rng_seed, "recall", round, slot);
            auto& o = out[slot];
            o.candidates = recall_candidates(graph_, index, src, pool_, cfg_.recall_k, rng, ropts);
            if (o.candidates.empty())
                throw GenerationError("agent " + src + ": no destination candidates (pool holds only the source)");

            for (std::size_t attempt = 0; attempt < cfg_.policy_attempts; ++attempt) {
                const SelectionContext ctx{graph_, graph_.node(src), memory, o.candidates, base_time, gap_,
                                           round,  slot,               attempt, cfg_.rng_seed};
                auto action = policy_.select_destination(ctx);
                const auto it = std::find(o.candidates.begin(), o.candidates.end(), action.chosen_dst);
                if (it == o.candidates.end()) {
                    ++o.invalid;
                    continue;
                }
                o.rank = static_cast<std::size_t>(it - o.candidates.begin());
                Timestamp t = action.timestamp
                                  ? match_kind(*action.timestamp, integral_)
                                  : match_kind(memory.latest().value_or(base_time).plus(gap_), integral_);
                if (t < base_time) {
                    t = base_time;
                    o.clamped = true;
                }
                o.edge = {src, action.chosen_dst, t, std::move(action.label), std::move(action.edge_text)};
                return;
            }
            throw GenerationError("agent " + src + ": policy chose outside the recall list " +
                                  std::to_string(cfg_.policy_attempts) + " times");
        });

        std::vector<std::size_t> order(out.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            const auto& ea = out[a].edge;
            const auto& eb = out[b].edge;
            if (ea.timestamp != eb.timestamp) return ea.timestamp < eb.timestamp;
            if (ea.src != eb.src) return ea.src < eb.src;
            if (out[a].rank != out[b].rank) return out[a].rank < out[b].rank;
            return a < b;
        });

        std::size_t clamps = 0, invalid = 0;
        for (auto i : order) {
            graph_.append_edge(out[i].edge);
            logs.push_back({graph_.num_edges() - 1, out[i].edge.src, out[i].edge.dst, std::move(out[i].candidates),
                            round, i});
            clamps += out[i].clamped;
            invalid += out[i].invalid;
        }
        if (clamps) spdlog::warn("round {}: {} timestamps clamped forward", round, clamps);
        round_ms_.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
        return {{"round", round},
                {"edges", sources.size()},
                {"distinct_sources", distinct.size()},
                {"timestamp_clamps", clamps},
                {"invalid_choices", invalid},
                {"reflection_failures", std::count(reflect_failed.begin(), reflect_failed.end(), 1)}};
    }

private:
    DyTag graph_;
    const GenConfig& cfg_;
    AgentPolicy& policy_;
    bool integral_ = true;
    bool allow_self_ = false;
    double gap_ = 1.0;
    std::vector<std::string> pool_;
    std::unordered_set<std::string> pool_set_;
    std::vector<double> round_ms_;
};

inline bool can_be_source(const NodeRecord& n) { return n.role != NodeRole::destination; }
inline bool can_be_destination(const NodeRecord& n) { return n.role != NodeRole::source; }

/// S draws from `pool`: without replacement when the pool is large enough,
/// otherwise with replacement.
inline std::vector<std::string> sample_sources(const std::vector<std::string>& pool, std::size_t S, Rng& rng)
{
    if (pool.empty()) throw GenerationError("no eligible source nodes");
    std::vector<std::string> out;
    if (pool.size() >= S) {
        for (auto i : sample_without_replacement(rng, pool.size(), S)) out.push_back(pool[i]);
    } else {
        for (std::size_t i = 0; i < S; ++i) out.push_back(pool[uniform_index(rng, pool.size())]);
    }
    return out;
}

inline nlohmann::json base_manifest(const GenConfig& cfg, const AgentPolicy& policy, const DyTag& seed)
{
    return {{"mode", to_string(cfg.mode)},
            {"policy", policy.name()},
            {"config", cfg.to_json()},
            {"seed_edges", seed.num_edges()},
            {"seed_nodes", seed.num_nodes()},
            {"rounds", nlohmann::json::array()}};
}

inline void finish(GenResult& r, const AgentPolicy& policy)
{
    r.manifest["status"] = r.ok ? "ok" : "error";
    if (!r.ok) r.manifest["error"] = r.error;
    r.manifest["rounds_completed"] = r.rounds_completed;
    r.manifest["policy_stats"] = policy.stats();
    r.manifest["output_edges"] = r.graph.num_edges();
    r.manifest["output_nodes"] = r.graph.num_nodes();
}

} // namespace detail

/// Transductive generation over the ground-truth node universe. Each round
/// activates the sources of the next S ground-truth continuation edges
/// (or a uniform sample, per config); the destination pool starts with the
/// seed's destinations and gains each round's ground-truth destinations.
inline GenResult run_tdgg(const DyTag& seed, const DyTag& truth, const GenConfig& cfg, AgentPolicy& policy)
{
    cfg.validate();
    if (seed.num_edges() == 0) throw InvalidArgument("run_tdgg: seed graph has no edges");
    if (seed.num_edges() > truth.num_edges()) throw InvalidArgument("run_tdgg: seed is longer than the ground truth");
    for (const auto& n : seed.nodes())
        if (!truth.contains(n.node_id)) throw InvalidArgument("run_tdgg: seed node " + n.node_id + " not in ground truth");

    GenResult result;
    result.manifest = detail::base_manifest(cfg, policy, seed);
    detail::Generator gen(DyTag::build(truth.nodes(), seed.edges(), truth.bipartite()), cfg, policy);
    gen.set_median_gap(median_gap(seed));
    result.manifest["median_gap"] = gen.gap();

    for (const auto& e : seed.edges()) {
        if (truth.bipartite()) {
            gen.add_to_pool(e.dst);
        } else {
            gen.add_to_pool(e.src);
            gen.add_to_pool(e.dst);
        }
    }
    std::vector<std::string> source_universe;
    for (const auto& n : truth.nodes())
        if (detail::can_be_source(n)) source_universe.push_back(n.node_id);

    const auto& cont = truth.edges();
    std::size_t cursor = seed.num_edges(), replay_short = 0;
    for (std::size_t k = 0; k < cfg.rounds; ++k) {
        std::vector<std::string> sources;
        for (std::size_t j = 0; j < cfg.edges_per_round && cursor < cont.size(); ++j, ++cursor) {
            if (cfg.source_selection == SourceSelection::replay) sources.push_back(cont[cursor].src);
            gen.add_to_pool(cont[cursor].dst);
        }
        if (sources.size() < cfg.edges_per_round) {
            if (cfg.source_selection == SourceSelection::replay) replay_short += cfg.edges_per_round - sources.size();
            auto rng = substream(cfg.rng_seed, "sources", k);
            auto extra = detail::sample_sources(source_universe, cfg.edges_per_round - sources.size(), rng);
            sources.insert(sources.end(), extra.begin(), extra.end());
        }
        try {
            result.manifest["rounds"].push_back(gen.run_round(k, sources, result.recall_logs));
            ++result.rounds_completed;
        } catch (const std::exception& e) {
            result.ok = false;
            result.error = "round " + std::to_string(k) + ": " + e.what();
            spdlog::error("{}", result.error);
            break;
        }
    }
    if (replay_short)
        spdlog::warn("ground-truth continuation ran out; {} sources drawn uniformly instead", replay_short);
    result.manifest["replay_shortfall"] = replay_short;
    result.graph = std::move(gen.graph());
    result.round_ms = std::move(gen.round_ms());
    detail::finish(result, policy);
    return result;
}

/// Inductive generation: each round the policy creates r_src new sources and
/// r_dst new destinations ("G" + 5 digits ids), then S sources sampled
/// uniformly from the grown source set each add one edge.
inline GenResult run_idgg(const DyTag& seed, const GenConfig& cfg, AgentPolicy& policy)
{
    cfg.validate();
    if (seed.num_edges() == 0) throw InvalidArgument("run_idgg: seed graph has no edges");
    NodeRates rates{cfg.r_src, cfg.r_dst};
    if (rates.r_src == 0 || rates.r_dst == 0) {
        const auto derived = derive_node_rates(seed, cfg.edges_per_round);
        if (rates.r_src == 0) rates.r_src = derived.r_src;
        if (rates.r_dst == 0) rates.r_dst = derived.r_dst;
    }

    GenResult result;
    result.manifest = detail::base_manifest(cfg, policy, seed);
    result.manifest["r_src"] = rates.r_src;
    result.manifest["r_dst"] = rates.r_dst;
    detail::Generator gen(seed, cfg, policy);
    gen.set_median_gap(median_gap(seed));
    result.manifest["median_gap"] = gen.gap();

    std::vector<std::string> sources_pool;
    for (const auto& n : seed.nodes()) {
        if (detail::can_be_source(n)) sources_pool.push_back(n.node_id);
        if (detail::can_be_destination(n)) gen.add_to_pool(n.node_id);
    }

    // Nodes active in the most recent round (the seed's last S edges at first).
    std::vector<std::string> recent_src, recent_dst;
    auto note_recent = [&](std::span<const TemporalEdge> edges) {
        recent_src.clear();
        recent_dst.clear();
        for (auto it = edges.rbegin(); it != edges.rend(); ++it) {
            if (std::find(recent_src.begin(), recent_src.end(), it->src) == recent_src.end()) recent_src.push_back(it->src);
            if (std::find(recent_dst.begin(), recent_dst.end(), it->dst) == recent_dst.end()) recent_dst.push_back(it->dst);
        }
    };
    {
        const auto n = std::min(seed.num_edges(), cfg.edges_per_round);
        note_recent(std::span(seed.edges()).subspan(seed.num_edges() - n));
    }

    const bool bip = seed.bipartite();
    for (std::size_t k = 0; k < cfg.rounds; ++k) {
        try {
            auto& g = gen.graph();
            std::size_t created = 0;
            for (int side = 0; side < 2; ++side) {
                const bool source_side = side == 0;
                const std::size_t count = source_side ? rates.r_src : rates.r_dst;
                const auto& recent_ids = source_side ? recent_src : recent_dst;
                for (std::size_t i = 0; i < count; ++i) {
                    NodeContext ctx{g, bip ? (source_side ? NodeRole::source : NodeRole::destination) : NodeRole::both,
                                    source_side, {}, k, i, cfg.rng_seed};
                    for (std::size_t r = 0; r < recent_ids.size() && r < 5; ++r)
                        ctx.recent.push_back(&g.node(recent_ids[r]));
                    NodeRecord node = policy.generate_node(ctx);
                    node.role = ctx.role;
                    node.origin = NodeOrigin::generated;
                    auto valid = [&](const std::string& id) {
                        if (id.size() < 6 || id.size() > 7 || id[0] != 'G') return false;
                        return std::all_of(id.begin() + 1, id.end(), [](char c) { return c >= '0' && c <= '9'; })
                               && !g.contains(id);
                    };
                    if (!valid(node.node_id)) {
                        std::string id;
                        for (int attempt = 0; attempt < 5 && id.empty(); ++attempt) {
                            auto rng = substream(cfg.rng_seed, "node-id", k, side, i, attempt);
                            char buf[8];
                            std::snprintf(buf, sizeof buf, "G%05u", static_cast<unsigned>(uniform_index(rng, 100000)));
                            if (valid(buf)) id = buf;
                        }
                        if (id.empty()) throw GenerationError("could not find a free generated node id in 5 attempts");
                        node.node_id = id;
                    }
                    g.add_node(node);
                    if (detail::can_be_source(node)) sources_pool.push_back(node.node_id);
                    if (detail::can_be_destination(node)) gen.add_to_pool(node.node_id);
                    ++created;
                }
            }
            auto rng = substream(cfg.rng_seed, "sources", k);
            const auto sources = detail::sample_sources(sources_pool, cfg.edges_per_round, rng);
            const auto before = g.num_edges();
            auto info = gen.run_round(k, sources, result.recall_logs);
            info["new_nodes"] = created;
            result.manifest["rounds"].push_back(std::move(info));
            ++result.rounds_completed;
            note_recent(std::span(gen.graph().edges()).subspan(before));
        } catch (const std::exception& e) {
            result.ok = false;
            result.error = "round " + std::to_string(k) + ": " + e.what();
            spdlog::error("{}", result.error);
            break;
        }
    }
    result.graph = std::move(gen.graph());
    result.round_ms = std::move(gen.round_ms());
    detail::finish(result, policy);
    return result;
}

inline GenResult run_generation(const DyTag& seed, const DyTag* truth, const GenConfig& cfg, AgentPolicy& policy)
{
    if (cfg.mode == GenMode::tdgg) {
        if (!truth) throw InvalidArgument("tdgg generation needs the ground-truth graph");
        return run_tdgg(seed, *truth, cfg, policy);
    }
    return run_idgg(seed, cfg, policy);
}

} // namespace dytag
