#pragma once

// Synthetic DyTAG fixtures shared by the unit and acceptance suites.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "dytag/core/graph.hpp"

namespace dytag::fixtures {

inline const std::vector<std::string>& vocabulary()
{
    static const std::vector<std::string> words{
        "hydrating", "serum",  "matte",   "lipstick", "gentle", "cleanser", "vitamin", "glow",
        "fragrance", "rich",   "texture", "sensitive", "skin",  "bright",   "night",   "cream",
        "oil",       "free",   "spray",   "mineral",   "water", "balm",     "repair",  "smooth",
        "long",      "lasting", "shade",  "soft",      "daily", "mask",     "toner",   "fresh"};
    return words;
}

inline std::string random_sentence(std::mt19937_64& rng, int words)
{
    std::uniform_int_distribution<std::size_t> pick(0, vocabulary().size() - 1);
    std::string s;
    for (int i = 0; i < words; ++i) {
        if (i) s += ' ';
        s += vocabulary()[pick(rng)];
    }
    return s;
}

struct FixtureSpec {
    std::size_t n_edges = 1000;
    std::size_t n_sources = 120;
    std::size_t n_destinations = 60;
    bool bipartite = true;
    std::uint64_t seed = 7;
    double zipf = 1.1; // skew of destination popularity
};

/// Review-style stream: sources pick destinations with a Zipf-like skew,
/// timestamps increase by 1-3 per edge, labels are ratings 1-5.
inline DyTag make_fixture(const FixtureSpec& spec)
{
    std::mt19937_64 rng(spec.seed);
    std::vector<NodeRecord> nodes;
    for (std::size_t i = 0; i < spec.n_sources; ++i)
        nodes.push_back({"u" + std::to_string(i), spec.bipartite ? NodeRole::source : NodeRole::both,
                         "user " + random_sentence(rng, 4), NodeOrigin::dataset});
    if (spec.bipartite)
        for (std::size_t i = 0; i < spec.n_destinations; ++i)
            nodes.push_back({"p" + std::to_string(i), NodeRole::destination, "product " + random_sentence(rng, 5),
                             NodeOrigin::dataset});

    std::vector<double> w(spec.bipartite ? spec.n_destinations : spec.n_sources);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = 1.0 / std::pow(static_cast<double>(i + 1), spec.zipf);
    std::discrete_distribution<std::size_t> pick_dst(w.begin(), w.end());
    std::uniform_int_distribution<std::size_t> pick_src(0, spec.n_sources - 1);
    std::uniform_int_distribution<int> gap(1, 3), rating(1, 5), len(3, 9);

    std::vector<TemporalEdge> edges;
    std::int64_t t = 1000;
    for (std::size_t i = 0; i < spec.n_edges; ++i) {
        t += gap(rng);
        const auto s = pick_src(rng);
        auto d = pick_dst(rng);
        std::string src = "u" + std::to_string(s);
        std::string dst = spec.bipartite ? "p" + std::to_string(d) : "u" + std::to_string(d);
        edges.push_back({src, dst, Timestamp{t}, std::to_string(rating(rng)), random_sentence(rng, len(rng))});
    }
    return DyTag::build(std::move(nodes), std::move(edges), spec.bipartite);
}

/// Star with center "c" and spokes s1..sk (non-bipartite).
inline DyTag make_star(int spokes)
{
    std::vector<NodeRecord> nodes{{"c", NodeRole::both, "center", NodeOrigin::dataset}};
    std::vector<TemporalEdge> edges;
    for (int i = 1; i <= spokes; ++i) {
        nodes.push_back({"s" + std::to_string(i), NodeRole::both, "spoke", NodeOrigin::dataset});
        edges.push_back({"c", "s" + std::to_string(i), Timestamp{std::int64_t{i}}, "x", "e"});
    }
    return DyTag::build(std::move(nodes), std::move(edges), false);
}

/// Undirected simple path/cycle helpers over ids n0..n(k-1) (non-bipartite).
inline DyTag make_from_pairs(int n_nodes, const std::vector<std::pair<int, int>>& pairs)
{
    std::vector<NodeRecord> nodes;
    for (int i = 0; i < n_nodes; ++i) nodes.push_back({"n" + std::to_string(i), NodeRole::both, "", NodeOrigin::dataset});
    std::vector<TemporalEdge> edges;
    std::int64_t t = 0;
    for (auto [a, b] : pairs)
        edges.push_back({"n" + std::to_string(a), "n" + std::to_string(b), Timestamp{t++}, "x", ""});
    return DyTag::build(std::move(nodes), std::move(edges), false);
}

} // namespace dytag::fixtures
