#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <sstream>

#include "dytag/core/io.hpp"
#include "support/fixtures.hpp"

using namespace dytag;

namespace {

std::vector<RawNode> nodes4()
{
    return {{1, "a", "source", "alice"}, {2, "b", "source", "bob"}, {3, "x", "destination", "item x"},
            {4, "y", "destination", "item y"}};
}

} // namespace

TEST(Timestamp, IntegralAndDecimalCompareNumerically)
{
    EXPECT_TRUE(Timestamp::parse("42")->integral());
    EXPECT_FALSE(Timestamp::parse("42.5")->integral());
    EXPECT_LT(*Timestamp::parse("42"), *Timestamp::parse("42.5"));
    EXPECT_EQ(*Timestamp::parse("7"), Timestamp{7.0});
    EXPECT_FALSE(Timestamp::parse("2021-01-01"));
    EXPECT_FALSE(Timestamp::parse(""));
    EXPECT_EQ(Timestamp::parse("1700000000123")->as_int(), 1700000000123);
}

TEST(ParseEdgeStream, ThreeRowsOverFourNodes)
{
    std::vector<RawEdge> edges{{1, "a", "x", "3", "5", "great"}, {2, "b", "y", "1", "4", "fine"},
                               {3, "a", "y", "2", "2", "meh"}};
    auto g = parse_edge_stream(edges, nodes4(), true);
    EXPECT_EQ(g.num_edges(), 3u);
    EXPECT_EQ(g.num_nodes(), 4u);
    EXPECT_EQ(g.edges()[0].text, "fine");
    EXPECT_EQ(g.edges()[2].text, "great");
}

TEST(ParseEdgeStream, DanglingEndpointIsNamed)
{
    std::vector<RawEdge> edges{{1, "a", "x", "1", "5", "ok"}, {2, "a", "X9", "2", "5", "bad"}};
    try {
        parse_edge_stream(edges, nodes4(), true);
        FAIL() << "expected DanglingEndpointError";
    } catch (const DanglingEndpointError& e) {
        EXPECT_EQ(e.node_id(), "X9");
        EXPECT_NE(std::string(e.what()).find("X9"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("row 2"), std::string::npos);
    }
}

TEST(ParseEdgeStream, MalformedTimestampReportsRow)
{
    std::vector<RawEdge> edges{{1, "a", "x", "1", "5", ""}, {2, "a", "x", "soon", "5", ""}};
    try {
        parse_edge_stream(edges, nodes4(), true);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
    }
}

TEST(ParseEdgeStream, DuplicateNodeAndBipartiteViolation)
{
    auto dup = nodes4();
    dup.push_back({5, "a", "source", "again"});
    EXPECT_THROW(parse_edge_stream({}, dup, true), DuplicateNodeError);

    std::vector<RawEdge> reversed{{1, "x", "a", "1", "5", ""}};
    EXPECT_THROW(parse_edge_stream(reversed, nodes4(), true), BipartiteViolation);

    auto with_both = nodes4();
    with_both.push_back({5, "z", "both", ""});
    EXPECT_THROW(parse_edge_stream({}, with_both, true), BipartiteViolation);
    EXPECT_FALSE(parse_edge_stream({}, with_both).bipartite()); // inferred
}

TEST(ParseEdgeStream, ShuffledThousandEdgesSortedStably)
{
    // Many timestamp ties so stability matters.
    std::mt19937_64 rng(11);
    std::vector<RawEdge> rows;
    for (std::size_t i = 0; i < 1000; ++i)
        rows.push_back({i + 1, i % 2 ? "a" : "b", i % 3 ? "x" : "y", std::to_string(rng() % 200), "1",
                        "edge " + std::to_string(i)});
    std::shuffle(rows.begin(), rows.end(), rng);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].row = i + 1;

    auto g = parse_edge_stream(rows, nodes4(), true);

    // Oracle: comparison sort on (timestamp, input position).
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        const long ti = std::stol(rows[i].ts), tj = std::stol(rows[j].ts);
        return ti != tj ? ti < tj : i < j;
    });
    ASSERT_EQ(g.num_edges(), rows.size());
    for (std::size_t k = 0; k < order.size(); ++k) EXPECT_EQ(g.edges()[k].text, rows[order[k]].text);
}

TEST(ParseEdgeStream, DecimalColumnWidensAllValues)
{
    std::vector<RawEdge> edges{{1, "a", "x", "3", "5", ""}, {2, "b", "y", "1.5", "4", ""}};
    auto g = parse_edge_stream(edges, nodes4(), true);
    for (const auto& e : g.edges()) EXPECT_FALSE(e.timestamp.integral());
    EXPECT_EQ(g.edges()[0].timestamp, Timestamp{1.5});
}

TEST(Csv, QuotedFieldsWithDelimitersAndNewlines)
{
    std::istringstream in("src,dst,ts,label,text,extra\n"
                          "a,x,1,5,\"hello, \"\"world\"\"\nsecond line\",junk\r\n"
                          "b,y,2,4,\"plain\",\n");
    std::vector<std::string> warnings;
    auto rows = read_edges_csv(in, ',', &warnings);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].text, "hello, \"world\"\nsecond line");
    EXPECT_EQ(rows[1].text, "plain");
    ASSERT_EQ(warnings.size(), 1u);
    EXPECT_NE(warnings[0].find("extra"), std::string::npos);
}

TEST(Csv, MissingColumnAndShortRow)
{
    std::istringstream no_text("src,dst,ts,label\na,x,1,5\n");
    EXPECT_THROW(read_edges_csv(no_text), ParseError);
    std::istringstream short_row("src,dst,ts,label,text\na,x,1\n");
    try {
        read_edges_csv(short_row);
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 1u);
    }
}

TEST(Jsonl, SameFieldNames)
{
    std::istringstream nodes(R"({"node_id":"a","role":"source","text":"alice"}
{"node_id":"x","role":"destination","text":"item","color":"red"}
)");
    std::istringstream edges(R"({"src":"a","dst":"x","ts":12,"label":"5","text":"nice"}
{"src":"a","dst":"x","ts":"10","label":"3","text":"ok"}
)");
    auto g = parse_edge_stream(read_edges_jsonl(edges), read_nodes_jsonl(nodes));
    EXPECT_TRUE(g.bipartite());
    ASSERT_EQ(g.num_edges(), 2u);
    EXPECT_EQ(g.edges()[0].timestamp, Timestamp{std::int64_t{10}});
}

TEST(Serialize, RoundTripIsByteIdenticalOnCanonicalInput)
{
    // Property over random fixtures: parse(serialize(g)) == g and the second
    // serialization is byte-identical to the first.
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto g = fixtures::make_fixture({.n_edges = 200, .seed = seed});
        std::vector<NodeRecord> nodes = g.nodes();
        nodes[0].text = "multi\nline, \"quoted\" text";
        std::vector<TemporalEdge> edges = g.edges();
        edges[3].text = "comma, and \"quote\"\r\nnewline";
        g = DyTag::build(nodes, edges, true);

        std::ostringstream e1, n1;
        write_edges_csv(e1, g.edges());
        write_nodes_csv(n1, g.nodes());
        std::istringstream ein(e1.str()), nin(n1.str());
        auto g2 = parse_edge_stream(read_edges_csv(ein), read_nodes_csv(nin), true);
        EXPECT_EQ(g2.edges(), g.edges());
        EXPECT_EQ(g2.nodes(), g.nodes());
        std::ostringstream e2, n2;
        write_edges_csv(e2, g2.edges());
        write_nodes_csv(n2, g2.nodes());
        EXPECT_EQ(e1.str(), e2.str());
        EXPECT_EQ(n1.str(), n2.str());
    }
}

TEST(SliceSeed, BoundaryAndSizes)
{
    auto g = fixtures::make_fixture({.n_edges = 10000, .seed = 3});
    auto split = slice_seed(g, 1000);
    EXPECT_EQ(split.seed.num_edges(), 1000u);
    EXPECT_EQ(split.remainder.num_edges(), 9000u);
    EXPECT_EQ(split.remainder.num_nodes(), g.num_nodes());

    auto all = slice_seed(g, g.num_edges());
    EXPECT_EQ(all.remainder.num_edges(), 0u);

    EXPECT_THROW(slice_seed(g, 0), InvalidArgument);
    EXPECT_THROW(slice_seed(g, g.num_edges() + 1), InvalidArgument);
}

TEST(SliceSeed, ToyGraphIncidentNodes)
{
    std::vector<NodeRecord> nodes;
    for (auto id : {"a", "b", "c", "d", "e", "f", "g"}) nodes.push_back({id, NodeRole::both, id, NodeOrigin::dataset});
    std::vector<TemporalEdge> edges{{"a", "b", Timestamp{std::int64_t{1}}, "", ""},
                                    {"a", "c", Timestamp{std::int64_t{2}}, "", ""},
                                    {"d", "e", Timestamp{std::int64_t{3}}, "", ""},
                                    {"a", "b", Timestamp{std::int64_t{4}}, "", ""},
                                    {"f", "g", Timestamp{std::int64_t{5}}, "", ""}};
    auto g = DyTag::build(nodes, edges, false);
    auto split = slice_seed(g, 3);
    std::vector<std::string> ids;
    for (const auto& n : split.seed.nodes()) ids.push_back(n.node_id);
    EXPECT_EQ(ids, (std::vector<std::string>{"a", "b", "c", "d", "e"}));
}

TEST(SliceSeed, ConcatenationIdentityForEveryCut)
{
    auto g = fixtures::make_fixture({.n_edges = 60, .n_sources = 10, .n_destinations = 8, .seed = 9});
    for (std::size_t n = 1; n <= g.num_edges(); ++n) {
        auto split = slice_seed(g, n);
        std::vector<TemporalEdge> joined = split.seed.edges();
        joined.insert(joined.end(), split.remainder.edges().begin(), split.remainder.edges().end());
        ASSERT_EQ(joined, g.edges()) << "cut " << n;
        for (const auto& node : split.seed.nodes()) ASSERT_TRUE(g.contains(node.node_id));
    }
}

TEST(DegreeSequence, EmptyStarAndHandshake)
{
    EXPECT_TRUE(degree_sequence(DyTag{}).empty());
    EXPECT_EQ(degree_sequence(fixtures::make_star(4)), (std::vector<std::size_t>{4, 1, 1, 1, 1}));

    auto g = fixtures::make_fixture({.n_edges = 50, .n_sources = 20, .bipartite = false, .seed = 5});
    auto all = degree_sequence(g, DegreeSide::all);
    EXPECT_EQ(std::accumulate(all.begin(), all.end(), std::size_t{0}), 2 * g.num_edges());

    auto b = fixtures::make_fixture({.n_edges = 50, .seed = 5});
    auto src = degree_sequence(b, DegreeSide::source);
    auto dst = degree_sequence(b, DegreeSide::destination);
    EXPECT_EQ(std::accumulate(src.begin(), src.end(), std::size_t{0}), b.num_edges());
    EXPECT_EQ(std::accumulate(dst.begin(), dst.end(), std::size_t{0}), b.num_edges());
}

TEST(DyTag, AppendKeepsTimestampOrder)
{
    auto g = fixtures::make_star(3);
    g.append_edge({"c", "s1", Timestamp{std::int64_t{2}}, "late", ""});
    ASSERT_EQ(g.num_edges(), 4u);
    EXPECT_EQ(g.edges()[2].label, "late"); // after the existing edge at t=2
    EXPECT_THROW(g.append_edge({"c", "nope", Timestamp{std::int64_t{9}}, "", ""}), DanglingEndpointError);
}
