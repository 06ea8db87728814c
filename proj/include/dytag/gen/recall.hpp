#pragma once

#include <algorithm>
#include <numeric>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "dytag/core/graph.hpp"
#include "dytag/gen/memory.hpp"
#include "dytag/util/rng.hpp"

namespace dytag {

struct RecallOptions {
    bool exclude_source = true; ///< keep src out of its own list (non-bipartite graphs without self-loops)
};

/// Up to k destinations for `src`, ranked: destinations src has already
/// interacted with (most recent first); then the k/2 highest-degree pool
/// nodes (ties by pool order); then a seeded uniform sample of the rest of
/// the pool. Only pool members are listed, each once.
inline std::vector<std::string> recall_candidates(const DyTag& g, const GraphIndex& index, std::string_view src,
                                                  std::span<const std::string> pool, std::size_t k, Rng& rng,
                                                  const RecallOptions& opts = {})
{
    if (pool.empty()) throw InvalidArgument("recall_candidates: destination pool is empty");
    std::vector<std::string> out;
    std::unordered_set<std::string_view> taken;
    std::unordered_set<std::string_view> in_pool(pool.begin(), pool.end());
    auto eligible = [&](std::string_view id) {
        return in_pool.contains(id) && !taken.contains(id) && !(opts.exclude_source && id == src);
    };
    auto take = [&](std::string_view id) {
        taken.insert(id);
        out.emplace_back(id);
    };

    if (auto s = g.index_of(src)) {
        const auto& inc = index.incident[*s];
        for (auto it = inc.rbegin(); it != inc.rend() && out.size() < k; ++it) {
            const auto& e = g.edges()[*it];
            if (e.src == src && eligible(e.dst)) take(*in_pool.find(e.dst));
        }
    }

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto degree_of = [&](std::size_t i) -> std::size_t {
        auto idx = g.index_of(pool[i]);
        return idx ? index.degree[*idx] : 0;
    };
    std::vector<std::size_t> deg(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) deg[i] = degree_of(i);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return deg[a] > deg[b]; });
    const std::size_t degree_budget = std::min(k - out.size(), k / 2);
    for (std::size_t n = 0, i = 0; i < order.size() && n < degree_budget; ++i) {
        if (!eligible(pool[order[i]])) continue;
        take(pool[order[i]]);
        ++n;
    }

    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (eligible(pool[i])) rest.push_back(i);
    for (auto j : sample_without_replacement(rng, rest.size(), k - out.size())) take(pool[rest[j]]);
    return out;
}

inline std::vector<std::string> recall_candidates(const DyTag& g, std::string_view src,
                                                  std::span<const std::string> pool, std::size_t k, Rng& rng,
                                                  const RecallOptions& opts = {})
{
    return recall_candidates(g, GraphIndex(g), src, pool, k, rng, opts);
}

} // namespace dytag
