#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "dytag/embed/graph_embedding.hpp"
#include "support/fixtures.hpp"

using namespace dytag;

namespace {

double cosine(const std::vector<double>& a, const std::vector<double>& b)
{
    double ab = 0, aa = 0, bb = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    return ab / std::sqrt(aa * bb);
}

double dot(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::string random_word(std::mt19937_64& rng, char prefix)
{
    std::uniform_int_distribution<int> ch('a', 'z'), len(3, 8);
    std::string w(1, prefix);
    for (int i = len(rng); i > 0; --i) w.push_back(static_cast<char>(ch(rng)));
    return w;
}

// a --(t=10)--> b, c --(t=20)--> a, d isolated.
DyTag toy_graph()
{
    return DyTag::build({{"a", NodeRole::both, "night cream", NodeOrigin::dataset},
                         {"b", NodeRole::both, "lip balm", NodeOrigin::dataset},
                         {"c", NodeRole::both, "serum", NodeOrigin::dataset},
                         {"d", NodeRole::both, "toner mist", NodeOrigin::dataset}},
                        {{"a", "b", Timestamp{std::int64_t{10}}, "5", "great texture"},
                         {"c", "a", Timestamp{std::int64_t{20}}, "3", "too sticky"}},
                        false);
}

EmbeddingOptions small_opts(std::uint64_t seed = 11)
{
    EmbeddingOptions o;
    o.k_rows = 16;
    o.d_cols = 64;
    o.seed = seed;
    return o;
}

} // namespace

TEST(Tokenize, WordsAndIdeographs)
{
    EXPECT_EQ(tokenize("Night-Cream, 2 pcs!"), (std::vector<std::string>{"night", "cream", "2", "pcs"}));
    EXPECT_EQ(tokenize("夜霜 好用"), (std::vector<std::string>{"夜", "霜", "好", "用"}));
    EXPECT_EQ(tokenize("Crème brûlée"), (std::vector<std::string>{"crème", "brûlée"}));
    EXPECT_TRUE(tokenize("  ,.;  ").empty());
}

TEST(HashedEncoder, EmptyDeterministicNormalized)
{
    const HashedTextEncoder enc(256);
    const auto z = enc.encode("");
    ASSERT_EQ(z.size(), 256u);
    for (double x : z) EXPECT_EQ(x, 0.0);

    const auto a = enc.encode("night cream"), b = HashedTextEncoder(256).encode("night cream");
    EXPECT_EQ(a, b);
    EXPECT_NEAR(dot(a, a), 1.0, 1e-12);
    EXPECT_EQ(enc.encode("NIGHT  cream!"), a);
    EXPECT_THROW(HashedTextEncoder(0), InvalidArgument);
}

TEST(HashedEncoder, DisjointTokenTextsNearlyOrthogonal)
{
    const HashedTextEncoder enc(256);
    std::mt19937_64 rng(404);
    double worst = 0, mean_abs = 0;
    for (int p = 0; p < 100; ++p) {
        std::string x, y;
        for (int w = 0; w < 20; ++w) {
            x += random_word(rng, 'x') + " ";
            y += random_word(rng, 'y') + " ";
        }
        const double c = cosine(enc.encode(x), enc.encode(y));
        worst = std::max(worst, c);
        mean_abs += std::abs(c) / 100;
    }
    EXPECT_LT(worst, 0.2);
    EXPECT_LT(mean_abs, 0.08);
}

TEST(NodeEmbedding, LengthFormula)
{
    const HashedTextEncoder enc(4);
    const auto g = toy_graph();
    EXPECT_EQ(node_embedding(g, "a", enc).vector.size(), 22u); // 2 * (1 + 8) + 4
    EXPECT_EQ(node_embedding(g, "b", enc).vector.size(), 13u);
    const auto iso = node_embedding(g, "d", enc);
    EXPECT_EQ(iso.vector, enc.encode("toner mist"));
    EXPECT_THROW(node_embedding(g, "zz", enc), InvalidArgument);

    const auto big = fixtures::make_fixture({});
    const HashedTextEncoder enc8(8);
    for (const auto& n : big.nodes()) {
        std::size_t m = 0;
        for (const auto& e : big.edges()) m += (e.src == n.node_id || e.dst == n.node_id);
        ASSERT_EQ(node_embedding(big, n.node_id, enc8).vector.size(), m * 17 + 8) << n.node_id;
    }
}

TEST(NodeEmbedding, TripleLayoutAndTimeNormalization)
{
    const HashedTextEncoder enc(4);
    const auto g = toy_graph();
    const auto v = node_embedding(g, "a", enc).vector;
    EXPECT_EQ(v[0], 0.0); // t = t_min
    EXPECT_EQ(std::vector<double>(v.begin() + 1, v.begin() + 5), enc.encode("great texture"));
    EXPECT_EQ(std::vector<double>(v.begin() + 5, v.begin() + 9), enc.encode("lip balm"));
    EXPECT_EQ(v[9], 1.0); // t = t_max
    EXPECT_EQ(std::vector<double>(v.begin() + 14, v.begin() + 18), enc.encode("serum"));
    EXPECT_EQ(std::vector<double>(v.begin() + 18, v.end()), enc.encode("night cream"));

    const auto wide = node_embedding(g, "a", enc, TimeRange{0, 40}).vector;
    EXPECT_DOUBLE_EQ(wide[0], 0.25);
    EXPECT_DOUBLE_EQ(wide[9], 0.5);
    EXPECT_EQ(node_embedding(g, "a", enc, TimeRange{5, 5}).vector[9], 0.0);
}

TEST(NodeEmbedding, PrecomputedVectorsOverrideText)
{
    const auto path = std::filesystem::temp_directory_path() / "dytag_embed_vectors.jsonl";
    {
        std::ofstream out(path);
        out << R"({"node_id": "b", "vector": [1, 0, 0, 0]})" << "\n\n"
            << R"({"node_id": "a", "vector": [0, 0, 0.5, 0.5]})" << "\n";
    }
    const auto pre = PrecomputedNodeVectors::load_jsonl(path);
    EXPECT_EQ(pre.size(), 2u);
    const HashedTextEncoder enc(4);
    const auto v = node_embedding(toy_graph(), "a", enc, std::nullopt, &pre).vector;
    EXPECT_EQ(std::vector<double>(v.begin() + 5, v.begin() + 9), (std::vector<double>{1, 0, 0, 0}));
    EXPECT_EQ(std::vector<double>(v.begin() + 18, v.end()), (std::vector<double>{0, 0, 0.5, 0.5}));

    {
        std::ofstream out(path);
        out << R"({"node_id": "b", "vector": [1, 0]})" << "\n" << R"({"node_id": "a", "vector": [1, 0, 0]})" << "\n";
    }
    EXPECT_THROW(PrecomputedNodeVectors::load_jsonl(path), InvalidArgument);
    {
        std::ofstream out(path);
        out << R"({"id": "b"})" << "\n";
    }
    EXPECT_THROW(PrecomputedNodeVectors::load_jsonl(path), ParseError);
    std::filesystem::remove(path);
    EXPECT_THROW(PrecomputedNodeVectors::load_jsonl(path), Error);
}

TEST(RandomProjection, PreservesInnerProducts)
{
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> N(0, 1);
    const RandomProjection proj(1024, 99, 500);
    int within = 0;
    for (int p = 0; p < 50; ++p) {
        std::vector<double> x(500), y(500);
        for (int i = 0; i < 500; ++i) {
            x[i] = N(rng);
            y[i] = x[i] + 0.7 * N(rng);
        }
        const double exact = dot(x, y);
        const double approx = dot(proj.project(x), proj.project(y));
        within += std::abs(approx - exact) / std::abs(exact) <= 0.15;
    }
    EXPECT_GE(within, 48);
}

TEST(RandomProjection, CachedColumnsMatchOnDemand)
{
    std::vector<double> x(300);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 7 == 0) ? 0.0 : std::sin(static_cast<double>(i));
    EXPECT_EQ(RandomProjection(128, 5, 0).project(x), RandomProjection(128, 5, 100).project(x));
    EXPECT_NE(RandomProjection(128, 5).project(x), RandomProjection(128, 6).project(x));
}

TEST(GraphEmbedding, DeterministicAndOrderInvariant)
{
    const HashedTextEncoder enc(32);
    const auto g = fixtures::make_fixture({.n_edges = 300});
    const auto a = graph_embedding(g, enc, small_opts());
    const auto b = graph_embedding(g, enc, small_opts());
    ASSERT_EQ(a.matrix.rows(), 16);
    ASSERT_EQ(a.matrix.cols(), 64);
    EXPECT_TRUE(a.matrix == b.matrix);

    auto opts = small_opts();
    opts.jobs = 4;
    EXPECT_TRUE(graph_embedding(g, enc, opts).matrix == a.matrix);

    auto nodes = g.nodes();
    std::reverse(nodes.begin(), nodes.end());
    const auto shuffled = DyTag::build(nodes, g.edges(), g.bipartite());
    EXPECT_TRUE(graph_embedding(shuffled, enc, small_opts()).matrix == a.matrix);

    EXPECT_FALSE(graph_embedding(g, enc, small_opts(12)).matrix == a.matrix);
    const auto defaults = graph_embedding(toy_graph(), enc, 256, 1024, 3);
    EXPECT_EQ(defaults.matrix.rows(), 256);
    EXPECT_EQ(defaults.matrix.cols(), 1024);
}

TEST(GraphEmbedding, DisjointGraphsDiffer)
{
    const HashedTextEncoder enc(32);
    const auto g = fixtures::make_fixture({.n_edges = 200, .seed = 1});
    const auto h = fixtures::make_fixture({.n_edges = 200, .n_sources = 50, .n_destinations = 30, .seed = 2});
    std::vector<NodeRecord> nodes;
    for (auto n : h.nodes()) {
        n.node_id = "h" + n.node_id;
        nodes.push_back(n);
    }
    std::vector<TemporalEdge> edges;
    for (auto e : h.edges()) {
        e.src = "h" + e.src;
        e.dst = "h" + e.dst;
        edges.push_back(e);
    }
    const auto h2 = DyTag::build(nodes, edges, true);
    EXPECT_FALSE(graph_embedding(g, enc, small_opts(1)).matrix == graph_embedding(h2, enc, small_opts(2)).matrix);
}

TEST(EmbeddingSimilarity, IdentityNegationSymmetry)
{
    const HashedTextEncoder enc(32);
    const auto g = fixtures::make_fixture({.n_edges = 300, .seed = 3});
    const auto h = fixtures::make_fixture({.n_edges = 300, .seed = 4});
    const auto a = graph_embedding(g, enc, small_opts());
    const auto b = graph_embedding(h, enc, small_opts());
    EXPECT_NEAR(embedding_similarity(a, a), 1.0, 1e-6);
    auto neg = a;
    neg.matrix = -a.matrix;
    EXPECT_NEAR(embedding_similarity(a, neg), -1.0, 1e-6);
    const double ab = embedding_similarity(a, b);
    EXPECT_EQ(ab, embedding_similarity(b, a));
    EXPECT_LE(std::abs(ab), 1.0);
}

TEST(EmbeddingSimilarity, Errors)
{
    const HashedTextEncoder enc(8);
    const auto g = toy_graph();
    const auto a = graph_embedding(g, enc, small_opts(1));
    EXPECT_THROW(embedding_similarity(a, graph_embedding(g, enc, small_opts(2))), InvalidArgument);
    auto wide = small_opts(1);
    wide.d_cols = 32;
    EXPECT_THROW(embedding_similarity(a, graph_embedding(g, enc, wide)), InvalidArgument);

    const auto blank = DyTag::build({{"x", NodeRole::both, "", NodeOrigin::dataset}}, {}, false);
    const auto z = graph_embedding(blank, enc, small_opts(1));
    EXPECT_THROW(embedding_similarity(a, z), NumericError);
    EXPECT_THROW(graph_embedding(DyTag::build({}, {}, false), enc, small_opts()), InvalidArgument);
}

TEST(EmbeddingReport, SharedTimeRangeAndKeys)
{
    const HashedTextEncoder enc(32);
    const auto truth = fixtures::make_fixture({.n_edges = 400});
    const auto r = embedding_report(truth, truth, enc, small_opts());
    EXPECT_NEAR(r.score, 1.0, 1e-12);
    const auto j = r.to_json();
    for (const char* key : {"graph_embedding_score", "rho", "seed", "k_rows", "d_cols"}) EXPECT_TRUE(j.contains(key));
    EXPECT_NEAR(j["rho"].get<double>(), 0.0, 1e-12);

    const auto tr = union_time_range(toy_graph(), truth);
    EXPECT_EQ(tr.lo, 10.0);
    EXPECT_EQ(tr.hi, truth.edges().back().timestamp.as_double());
}
