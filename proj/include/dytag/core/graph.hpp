#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dytag/core/timestamp.hpp"
#include "dytag/util/error.hpp"

namespace dytag {

enum class NodeRole { source, destination, both };
enum class NodeOrigin { dataset, generated };

inline std::string_view to_string(NodeRole r) noexcept
{
    switch (r) {
    case NodeRole::source: return "source";
    case NodeRole::destination: return "destination";
    case NodeRole::both: return "both";
    }
    return "both";
}

inline std::optional<NodeRole> parse_role(std::string_view s) noexcept
{
    if (s == "source" || s == "src") return NodeRole::source;
    if (s == "destination" || s == "dst") return NodeRole::destination;
    if (s == "both") return NodeRole::both;
    return std::nullopt;
}

inline std::string_view to_string(NodeOrigin o) noexcept
{
    return o == NodeOrigin::generated ? "generated" : "dataset";
}

struct NodeRecord {
    std::string node_id;
    NodeRole role = NodeRole::both;
    std::string text;
    NodeOrigin origin = NodeOrigin::dataset;

    friend bool operator==(const NodeRecord&, const NodeRecord&) = default;
};

struct TemporalEdge {
    std::string src;
    std::string dst;
    Timestamp timestamp;
    std::string label;
    std::string text;

    friend bool operator==(const TemporalEdge&, const TemporalEdge&) = default;
};

struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

/// A dynamic text-attributed graph: node registry in first-seen order plus an
/// edge stream kept in nondecreasing timestamp order (ties in insertion order).
/// Multi-edges and self-loops are kept as given.
class DyTag {
public:
    explicit DyTag(bool bipartite = true) : bipartite_(bipartite) {}

    /// Validates and builds a graph; edges are stably sorted by timestamp.
    static DyTag build(std::vector<NodeRecord> nodes, std::vector<TemporalEdge> edges, bool bipartite)
    {
        DyTag g(bipartite);
        g.nodes_.reserve(nodes.size());
        for (auto& n : nodes) g.add_node(std::move(n));
        for (const auto& e : edges) g.check_edge(e);
        std::stable_sort(edges.begin(), edges.end(),
                         [](const TemporalEdge& a, const TemporalEdge& b) { return a.timestamp < b.timestamp; });
        g.edges_ = std::move(edges);
        return g;
    }

    bool bipartite() const noexcept { return bipartite_; }
    const std::vector<NodeRecord>& nodes() const noexcept { return nodes_; }
    const std::vector<TemporalEdge>& edges() const noexcept { return edges_; }
    std::size_t num_nodes() const noexcept { return nodes_.size(); }
    std::size_t num_edges() const noexcept { return edges_.size(); }
    bool empty() const noexcept { return edges_.empty() && nodes_.empty(); }

    std::optional<std::size_t> index_of(std::string_view id) const
    {
        auto it = index_.find(id);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }
    bool contains(std::string_view id) const { return index_.find(id) != index_.end(); }

    const NodeRecord& node(std::string_view id) const
    {
        auto i = index_of(id);
        if (!i) throw InvalidArgument("unknown node \"" + std::string(id) + "\"");
        return nodes_[*i];
    }

    /// Registers a node; returns its registry index.
    std::size_t add_node(NodeRecord n)
    {
        if (bipartite_ && n.role == NodeRole::both)
            throw BipartiteViolation("node \"" + n.node_id + "\" has role both in a bipartite graph");
        if (index_.find(n.node_id) != index_.end()) throw DuplicateNodeError(n.node_id);
        index_.emplace(n.node_id, nodes_.size());
        nodes_.push_back(std::move(n));
        return nodes_.size() - 1;
    }

    /// Inserts an edge after every existing edge with timestamp <= its own.
    void append_edge(TemporalEdge e)
    {
        check_edge(e);
        auto pos = std::upper_bound(edges_.begin(), edges_.end(), e.timestamp,
                                    [](const Timestamp& t, const TemporalEdge& x) { return t < x.timestamp; });
        edges_.insert(pos, std::move(e));
    }

    /// Earliest and latest edge timestamp; nullopt on an edgeless graph.
    std::optional<std::pair<Timestamp, Timestamp>> time_span() const
    {
        if (edges_.empty()) return std::nullopt;
        return std::pair{edges_.front().timestamp, edges_.back().timestamp};
    }

    void check_edge(const TemporalEdge& e, std::size_t row = 0) const
    {
        auto s = index_.find(e.src);
        if (s == index_.end()) throw DanglingEndpointError(e.src, row);
        auto d = index_.find(e.dst);
        if (d == index_.end()) throw DanglingEndpointError(e.dst, row);
        if (bipartite_) {
            if (nodes_[s->second].role != NodeRole::source)
                throw BipartiteViolation("edge source \"" + e.src + "\" is not a source node");
            if (nodes_[d->second].role != NodeRole::destination)
                throw BipartiteViolation("edge destination \"" + e.dst + "\" is not a destination node");
        }
    }

private:
    bool bipartite_;
    std::vector<NodeRecord> nodes_;
    std::vector<TemporalEdge> edges_;
    std::unordered_map<std::string, std::size_t, StringHash, std::equal_to<>> index_;
};

enum class DegreeSide { all, source, destination };

/// Per-node incident edge counts in registry order. `source` yields
/// out-degrees of nodes with role source/both, `destination` in-degrees of
/// nodes with role destination/both. A self-loop adds 2 to the total degree.
inline std::vector<std::size_t> degree_sequence(const DyTag& g, DegreeSide side = DegreeSide::all)
{
    std::vector<std::size_t> out_deg(g.num_nodes(), 0), in_deg(g.num_nodes(), 0);
    for (const auto& e : g.edges()) {
        ++out_deg[*g.index_of(e.src)];
        ++in_deg[*g.index_of(e.dst)];
    }
    std::vector<std::size_t> seq;
    seq.reserve(g.num_nodes());
    for (std::size_t i = 0; i < g.num_nodes(); ++i) {
        const auto role = g.nodes()[i].role;
        switch (side) {
        case DegreeSide::all: seq.push_back(out_deg[i] + in_deg[i]); break;
        case DegreeSide::source:
            if (role != NodeRole::destination) seq.push_back(out_deg[i]);
            break;
        case DegreeSide::destination:
            if (role != NodeRole::source) seq.push_back(in_deg[i]);
            break;
        }
    }
    return seq;
}

struct SeedSplit {
    DyTag seed;
    DyTag remainder;
};

/// First n_edges edges with exactly their incident nodes, plus the remaining
/// edges over the full registry.
inline SeedSplit slice_seed(const DyTag& g, std::size_t n_edges)
{
    if (n_edges == 0 || n_edges > g.num_edges())
        throw InvalidArgument("seed size " + std::to_string(n_edges) + " outside [1, "
                              + std::to_string(g.num_edges()) + "]");

    std::vector<char> used(g.num_nodes(), 0);
    for (std::size_t i = 0; i < n_edges; ++i) {
        used[*g.index_of(g.edges()[i].src)] = 1;
        used[*g.index_of(g.edges()[i].dst)] = 1;
    }
    std::vector<NodeRecord> seed_nodes;
    for (std::size_t i = 0; i < g.num_nodes(); ++i)
        if (used[i]) seed_nodes.push_back(g.nodes()[i]);

    const auto& edges = g.edges();
    auto mid = edges.begin() + static_cast<std::ptrdiff_t>(n_edges);
    // Both halves are already sorted, so build() keeps their order unchanged.
    return SeedSplit{
        DyTag::build(std::move(seed_nodes), {edges.begin(), mid}, g.bipartite()),
        DyTag::build(g.nodes(), {mid, edges.end()}, g.bipartite()),
    };
}

} // namespace dytag
