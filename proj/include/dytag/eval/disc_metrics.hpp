#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "dytag/core/graph.hpp"
#include "dytag/gen/engine.hpp"
#include "dytag/util/text.hpp"

namespace dytag {

/// Generated and ground-truth edges paired by source and per-source
/// chronological index. Indices refer to positions in the full streams.
struct EdgeAlignment {
    struct Pair {
        std::size_t generated;
        std::size_t truth;
    };
    std::vector<Pair> pairs;
    std::size_t unmatched_generated = 0;
    std::size_t unmatched_truth = 0;
};

/// Drops the first `skip` edges of both streams, then pairs the i-th remaining
/// edge of each source in `generated` with the i-th of the same source in
/// `truth`. Pairs come out in generated-stream order.
inline EdgeAlignment align_edges(const DyTag& generated, const DyTag& truth, std::size_t skip)
{
    std::unordered_map<std::string_view, std::vector<std::size_t>> by_src;
    for (std::size_t i = skip; i < truth.num_edges(); ++i) by_src[truth.edges()[i].src].push_back(i);

    EdgeAlignment a;
    std::unordered_map<std::string_view, std::size_t> used;
    for (std::size_t i = skip; i < generated.num_edges(); ++i) {
        const auto& src = generated.edges()[i].src;
        const auto it = by_src.find(src);
        auto& n = used[src];
        if (it != by_src.end() && n < it->second.size())
            a.pairs.push_back({i, it->second[n++]});
        else
            ++a.unmatched_generated;
    }
    const std::size_t truth_tail = truth.num_edges() > skip ? truth.num_edges() - skip : 0;
    a.unmatched_truth = truth_tail - a.pairs.size();
    return a;
}

/// 1-based rank of each pair's true destination in the candidate list shown
/// when the generated edge was made; nullopt when it was not listed.
inline std::vector<std::optional<std::size_t>> retrieval_ranks(const EdgeAlignment& a, const DyTag& generated,
                                                               const DyTag& truth, std::span<const RecallLog> logs)
{
    std::unordered_map<std::size_t, const RecallLog*> by_edge;
    for (const auto& log : logs) by_edge[log.edge_index] = &log;
    std::vector<std::optional<std::size_t>> ranks;
    ranks.reserve(a.pairs.size());
    for (const auto& p : a.pairs) {
        const auto it = by_edge.find(p.generated);
        if (it == by_edge.end())
            throw InvalidArgument("no recall log for generated edge " + std::to_string(p.generated) + " ("
                                  + generated.edges()[p.generated].src + ")");
        const auto& c = it->second->candidates;
        const auto pos = std::find(c.begin(), c.end(), truth.edges()[p.truth].dst);
        ranks.push_back(pos == c.end() ? std::nullopt : std::optional<std::size_t>(pos - c.begin() + 1));
    }
    return ranks;
}

/// Share of ground-truth edges whose destination was ranked within the top k;
/// `extra_misses` (unmatched ground-truth edges) enlarge the denominator.
inline double hit_at_k(std::span<const std::optional<std::size_t>> ranks, std::size_t k, std::size_t extra_misses = 0)
{
    if (k == 0) throw InvalidArgument("hit_at_k: k must be >= 1");
    const auto total = ranks.size() + extra_misses;
    if (total == 0) return 0.0;
    const auto hits = std::count_if(ranks.begin(), ranks.end(), [k](const auto& r) { return r && *r <= k; });
    return static_cast<double>(hits) / static_cast<double>(total);
}

inline double hit_at_k(const EdgeAlignment& a, const DyTag& generated, const DyTag& truth,
                       std::span<const RecallLog> logs, std::size_t k)
{
    return hit_at_k(retrieval_ranks(a, generated, truth, logs), k, a.unmatched_truth);
}

struct WeightedPrf {
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t support = 0;
};

/// Per-class precision, recall and F1 averaged with weights equal to the
/// true-class support. A class never predicted has precision 0.
inline WeightedPrf weighted_prf(std::span<const std::string> truth, std::span<const std::string> predicted)
{
    if (truth.size() != predicted.size()) throw InvalidArgument("weighted_prf: label lists differ in length");
    if (truth.empty()) throw InvalidArgument("weighted_prf: no labels");
    std::map<std::string, std::size_t> support, predicted_n, correct;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        ++support[truth[i]];
        ++predicted_n[predicted[i]];
        if (truth[i] == predicted[i]) ++correct[truth[i]];
    }
    WeightedPrf out;
    out.support = truth.size();
    for (const auto& [label, n] : support) {
        const double tp = static_cast<double>(correct[label]);
        const double pn = static_cast<double>(predicted_n[label]);
        const double p = pn > 0 ? tp / pn : 0.0;
        const double r = tp / static_cast<double>(n);
        const double f = p + r > 0 ? 2 * p * r / (p + r) : 0.0;
        const double w = static_cast<double>(n) / static_cast<double>(truth.size());
        out.precision += w * p;
        out.recall += w * r;
        out.f1 += w * f;
    }
    return out;
}

inline WeightedPrf edge_classification_report(const EdgeAlignment& a, const DyTag& generated, const DyTag& truth)
{
    if (a.pairs.empty()) throw InvalidArgument("edge_classification_report: alignment has no pairs");
    std::vector<std::string> t, p;
    for (const auto& pr : a.pairs) {
        t.push_back(truth.edges()[pr.truth].label);
        p.push_back(generated.edges()[pr.generated].label);
    }
    return weighted_prf(t, p);
}

struct HubEntry {
    std::string node_id;
    std::size_t degree = 0;
    std::string excerpt;
};

/// Highest total-degree nodes, ties by node id.
inline std::vector<HubEntry> hub_report(const DyTag& g, std::size_t top_k, bool generated_only = false)
{
    const auto deg = degree_sequence(g, DegreeSide::all);
    std::vector<HubEntry> all;
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const auto& n = g.nodes()[i];
        if (generated_only && n.origin != NodeOrigin::generated) continue;
        all.push_back({n.node_id, deg[i], excerpt(n.text, 80)});
    }
    std::sort(all.begin(), all.end(), [](const HubEntry& a, const HubEntry& b) {
        return a.degree != b.degree ? a.degree > b.degree : a.node_id < b.node_id;
    });
    if (all.size() > top_k) all.resize(top_k);
    return all;
}

struct DiscReport {
    std::optional<double> hit1, hit10;
    std::optional<WeightedPrf> classification;
    std::size_t matched = 0, unmatched_generated = 0, unmatched_truth = 0;
    std::vector<HubEntry> hubs;
    std::vector<HubEntry> generated_hubs;

    nlohmann::json to_json() const
    {
        nlohmann::json j{{"matched", matched},
                         {"unmatched_generated", unmatched_generated},
                         {"unmatched_truth", unmatched_truth}};
        j["hit1"] = hit1 ? nlohmann::json(*hit1) : nlohmann::json();
        j["hit10"] = hit10 ? nlohmann::json(*hit10) : nlohmann::json();
        if (classification) {
            j["weighted_precision"] = classification->precision;
            j["weighted_recall"] = classification->recall;
            j["weighted_f1"] = classification->f1;
        } else {
            j["weighted_precision"] = j["weighted_recall"] = j["weighted_f1"] = nullptr;
        }
        auto table = [](const std::vector<HubEntry>& v) {
            auto t = nlohmann::json::array();
            for (const auto& e : v) t.push_back({{"node_id", e.node_id}, {"degree", e.degree}, {"excerpt", e.excerpt}});
            return t;
        };
        j["hubs"] = table(hubs);
        j["generated_hubs"] = table(generated_hubs);
        return j;
    }
};

/// Hit@k needs recall logs; without them only classification and hubs are
/// reported.
inline DiscReport discriminative_report(const DyTag& generated, const DyTag& truth, std::size_t skip,
                                        std::span<const RecallLog> logs, std::size_t hub_k = 10)
{
    DiscReport r;
    const auto a = align_edges(generated, truth, skip);
    r.matched = a.pairs.size();
    r.unmatched_generated = a.unmatched_generated;
    r.unmatched_truth = a.unmatched_truth;
    if (!logs.empty()) {
        const auto ranks = retrieval_ranks(a, generated, truth, logs);
        r.hit1 = hit_at_k(ranks, 1, a.unmatched_truth);
        r.hit10 = hit_at_k(ranks, 10, a.unmatched_truth);
    }
    if (!a.pairs.empty()) r.classification = edge_classification_report(a, generated, truth);
    r.hubs = hub_report(generated, hub_k);
    r.generated_hubs = hub_report(generated, hub_k, true);
    return r;
}

} // namespace dytag
