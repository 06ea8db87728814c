#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "dytag/core/graph.hpp"
#include "dytag/embed/text_encoder.hpp"
#include "dytag/util/error.hpp"
#include "dytag/util/hash.hpp"
#include "dytag/util/parallel.hpp"
#include "dytag/util/rng.hpp"

namespace dytag {

struct NodeEmbedding {
    std::string node_id;
    std::vector<double> vector;
};

struct GraphEmbedding {
    Eigen::MatrixXd matrix; ///< k_rows x d_cols
    std::uint64_t projection_seed = 0;
    std::size_t k_rows = 0;
    std::size_t d_cols = 0;
};

/// Closed time interval used to map timestamps into [0, 1].
struct TimeRange {
    double lo = 0.0;
    double hi = 0.0;

    double normalize(double t) const noexcept { return hi > lo ? (t - lo) / (hi - lo) : 0.0; }
};

inline std::optional<TimeRange> time_range_of(const DyTag& g)
{
    auto span = g.time_span();
    if (!span) return std::nullopt;
    return TimeRange{span->first.as_double(), span->second.as_double()};
}

/// Smallest range covering both graphs' timestamps.
inline TimeRange union_time_range(const DyTag& a, const DyTag& b)
{
    auto ra = time_range_of(a), rb = time_range_of(b);
    if (!ra && !rb) return {};
    if (!ra) return *rb;
    if (!rb) return *ra;
    return {std::min(ra->lo, rb->lo), std::max(ra->hi, rb->hi)};
}

struct EmbeddingOptions {
    std::size_t k_rows = 256;
    std::size_t d_cols = 1024;
    std::uint64_t seed = 0;
    std::optional<TimeRange> time_range;            ///< defaults to the graph's own span
    const PrecomputedNodeVectors* node_vectors = nullptr;
    std::size_t jobs = 1;
    std::size_t cached_columns = 8192;              ///< projection columns kept in memory
};

namespace detail {

class NodeTextFeatures {
public:
    NodeTextFeatures(const DyTag& g, const TextEncoder& enc, const PrecomputedNodeVectors* pre)
        : g_(g), enc_(enc), pre_(pre), cache_(g.num_nodes())
    {
        if (pre_ && pre_->size() > 0 && pre_->dim() != enc_.dim())
            throw InvalidArgument("precomputed vectors have dim " + std::to_string(pre_->dim())
                                  + " but the encoder has dim " + std::to_string(enc_.dim()));
    }

    /// Not thread-safe; call fill_all() before sharing across threads.
    const std::vector<double>& get(std::size_t idx)
    {
        auto& slot = cache_[idx];
        if (!slot) {
            const auto& rec = g_.nodes()[idx];
            const auto* v = pre_ ? pre_->find(rec.node_id) : nullptr;
            slot = v ? *v : enc_.encode(rec.text);
        }
        return *slot;
    }

    void fill_all()
    {
        for (std::size_t i = 0; i < cache_.size(); ++i) get(i);
    }

private:
    const DyTag& g_;
    const TextEncoder& enc_;
    const PrecomputedNodeVectors* pre_;
    std::vector<std::optional<std::vector<double>>> cache_;
};

/// Incident edge indices per node, in timestamp order (edges are already sorted).
inline std::vector<std::vector<std::size_t>> incident_edges(const DyTag& g)
{
    std::vector<std::vector<std::size_t>> inc(g.num_nodes());
    for (std::size_t e = 0; e < g.num_edges(); ++e) {
        const auto& edge = g.edges()[e];
        const auto s = *g.index_of(edge.src), d = *g.index_of(edge.dst);
        inc[s].push_back(e);
        if (d != s) inc[d].push_back(e);
    }
    return inc;
}

inline std::vector<double> build_node_embedding(const DyTag& g, std::size_t idx, const std::vector<std::size_t>& inc,
                                                const TextEncoder& enc, NodeTextFeatures& feats, const TimeRange& tr)
{
    const std::size_t dim = enc.dim();
    std::vector<double> v;
    v.reserve(inc.size() * (1 + 2 * dim) + dim);
    const auto& self = g.nodes()[idx].node_id;
    for (auto e : inc) {
        const auto& edge = g.edges()[e];
        v.push_back(tr.normalize(edge.timestamp.as_double()));
        const auto text = enc.encode(edge.text);
        v.insert(v.end(), text.begin(), text.end());
        const auto& other = edge.src == self ? edge.dst : edge.src;
        const auto& nt = feats.get(*g.index_of(other));
        v.insert(v.end(), nt.begin(), nt.end());
    }
    const auto& own = feats.get(idx);
    v.insert(v.end(), own.begin(), own.end());
    return v;
}

} // namespace detail

/// Concatenation over the node's interactions (timestamp order) of
/// (normalized timestamp, edge-text vector, counterpart-text vector),
/// followed by the node's own text vector.
inline NodeEmbedding node_embedding(const DyTag& g, std::string_view node_id, const TextEncoder& encoder,
                                    std::optional<TimeRange> time_range = std::nullopt,
                                    const PrecomputedNodeVectors* node_vectors = nullptr)
{
    const auto idx = g.index_of(node_id);
    if (!idx) throw InvalidArgument("unknown node: " + std::string(node_id));
    std::vector<std::size_t> inc;
    for (std::size_t e = 0; e < g.num_edges(); ++e)
        if (g.edges()[e].src == node_id || g.edges()[e].dst == node_id) inc.push_back(e);
    detail::NodeTextFeatures feats(g, encoder, node_vectors);
    const auto tr = time_range ? *time_range : time_range_of(g).value_or(TimeRange{});
    return {std::string(node_id), detail::build_node_embedding(g, *idx, inc, encoder, feats, tr)};
}

/// Seeded Gaussian map R^n -> R^d for any n. Entry (r, j) is a standard normal
/// addressed by (seed, j, r), scaled by 1/sqrt(d); the first `cached` columns
/// are materialized up front.
class RandomProjection {
public:
    RandomProjection(std::size_t d_cols, std::uint64_t seed, std::size_t cached = 0)
        : d_(d_cols), seed_(seed), scale_(1.0 / std::sqrt(static_cast<double>(d_cols)))
    {
        if (d_cols == 0) throw InvalidArgument("projection: d_cols must be >= 1");
        cache_.resize(cached * d_);
        for (std::size_t j = 0; j < cached; ++j)
            for (std::size_t r = 0; r < d_; ++r) cache_[j * d_ + r] = entry(j, r);
    }

    std::size_t d_cols() const noexcept { return d_; }

    double entry(std::size_t j, std::size_t r) const noexcept
    {
        return scale_ * counter_normal(hash_combine(seed_, 0x4a4cULL, j, r));
    }

    /// out += P x; zero coordinates are skipped.
    void accumulate(std::span<const double> x, std::span<double> out) const
    {
        const std::size_t cached = cache_.size() / d_;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double xj = x[j];
            if (xj == 0.0) continue;
            if (j < cached) {
                const double* col = cache_.data() + j * d_;
                for (std::size_t r = 0; r < d_; ++r) out[r] += xj * col[r];
            } else {
                for (std::size_t r = 0; r < d_; ++r) out[r] += xj * entry(j, r);
            }
        }
    }

    std::vector<double> project(std::span<const double> x) const
    {
        std::vector<double> out(d_, 0.0);
        accumulate(x, out);
        return out;
    }

private:
    std::size_t d_;
    std::uint64_t seed_;
    double scale_;
    std::vector<double> cache_;
};

/// Node-axis aggregation weight: +-1/sqrt(k_rows), keyed by node id so the
/// result does not depend on registry order.
inline double aggregation_weight(std::uint64_t seed, std::string_view node_id, std::size_t row, std::size_t k_rows)
{
    const auto h = hash_combine(seed, 0x41474752ULL, fnv1a64(node_id), row);
    return ((h >> 63) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(k_rows));
}

inline GraphEmbedding graph_embedding(const DyTag& g, const TextEncoder& encoder, const EmbeddingOptions& opts = {})
{
    if (g.num_nodes() == 0) throw InvalidArgument("graph_embedding: graph is empty");
    if (opts.k_rows == 0 || opts.d_cols == 0) throw InvalidArgument("graph_embedding: k_rows and d_cols must be >= 1");
    const auto tr = opts.time_range ? *opts.time_range : time_range_of(g).value_or(TimeRange{});
    const auto inc = detail::incident_edges(g);

    std::size_t max_len = 0;
    for (const auto& list : inc) max_len = std::max(max_len, list.size() * (1 + 2 * encoder.dim()) + encoder.dim());
    const RandomProjection proj(opts.d_cols, opts.seed, std::min(max_len, opts.cached_columns));

    detail::NodeTextFeatures feats(g, encoder, opts.node_vectors);
    feats.fill_all();

    const std::size_t n = g.num_nodes(), d = opts.d_cols;
    std::vector<double> projected(n * d, 0.0);
    parallel_for(n, opts.jobs, [&](std::size_t i) {
        const auto v = detail::build_node_embedding(g, i, inc[i], encoder, feats, tr);
        proj.accumulate(v, std::span<double>(projected.data() + i * d, d));
    });

    // Sequential reduction in node_id order keeps the floating-point sum order fixed.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return g.nodes()[a].node_id < g.nodes()[b].node_id; });

    GraphEmbedding out;
    out.matrix = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(opts.k_rows), static_cast<Eigen::Index>(d));
    out.projection_seed = opts.seed;
    out.k_rows = opts.k_rows;
    out.d_cols = d;
    for (auto i : order) {
        const Eigen::Map<const Eigen::RowVectorXd> row(projected.data() + i * d, static_cast<Eigen::Index>(d));
        const auto& id = g.nodes()[i].node_id;
        for (std::size_t r = 0; r < opts.k_rows; ++r)
            out.matrix.row(static_cast<Eigen::Index>(r)) += aggregation_weight(opts.seed, id, r, opts.k_rows) * row;
    }
    return out;
}

inline GraphEmbedding graph_embedding(const DyTag& g, const TextEncoder& encoder, std::size_t k_rows,
                                      std::size_t d_cols, std::uint64_t seed)
{
    EmbeddingOptions opts;
    opts.k_rows = k_rows;
    opts.d_cols = d_cols;
    opts.seed = seed;
    return graph_embedding(g, encoder, opts);
}

/// Frobenius cosine <A,B>_F / (|A|_F |B|_F), clamped to [-1, 1].
inline double embedding_similarity(const GraphEmbedding& a, const GraphEmbedding& b)
{
    if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols())
        throw InvalidArgument("embedding_similarity: shape mismatch (" + std::to_string(a.matrix.rows()) + "x"
                              + std::to_string(a.matrix.cols()) + " vs " + std::to_string(b.matrix.rows()) + "x"
                              + std::to_string(b.matrix.cols()) + ")");
    if (a.projection_seed != b.projection_seed)
        throw InvalidArgument("embedding_similarity: projection seeds differ");
    const double na = a.matrix.norm(), nb = b.matrix.norm();
    if (na == 0.0 || nb == 0.0) throw NumericError("embedding_similarity: zero-norm embedding");
    // Elementwise products commute exactly, so the score is symmetric bit for bit.
    const double dot = a.matrix.cwiseProduct(b.matrix).sum();
    return std::clamp(dot / (na * nb), -1.0, 1.0);
}

struct EmbeddingReport {
    double score = 0.0; ///< Frobenius cosine, higher is closer
    std::uint64_t seed = 0;
    std::size_t k_rows = 0;
    std::size_t d_cols = 0;

    double rho() const noexcept { return 1.0 - score; }

    nlohmann::json to_json() const
    {
        return {{"graph_embedding_score", score}, {"rho", rho()}, {"seed", seed}, {"k_rows", k_rows}, {"d_cols", d_cols}};
    }
};

/// Embeds both graphs with a shared seed and a shared time range (the union
/// of their spans) and compares them.
inline EmbeddingReport embedding_report(const DyTag& generated, const DyTag& truth, const TextEncoder& encoder,
                                        EmbeddingOptions opts = {})
{
    if (!opts.time_range) opts.time_range = union_time_range(generated, truth);
    const auto a = graph_embedding(generated, encoder, opts);
    const auto b = graph_embedding(truth, encoder, opts);
    return {embedding_similarity(a, b), opts.seed, opts.k_rows, opts.d_cols};
}

} // namespace dytag
