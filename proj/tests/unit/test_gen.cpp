#include <gtest/gtest.h>

#include <map>
#include <regex>
#include <set>

#include "dytag/gen/engine.hpp"
#include "dytag/gen/llm_policy.hpp"
#include "support/fixtures.hpp"

using namespace dytag;

namespace {

GenConfig small_config(std::size_t rounds, std::size_t S)
{
    GenConfig c;
    c.rounds = rounds;
    c.edges_per_round = S;
    c.rng_seed = 11;
    return c;
}

bool same_edges(const DyTag& a, const DyTag& b)
{
    return a.edges() == b.edges() && a.nodes() == b.nodes();
}

/// Policy that counts calls and always answers with a fixed pick rule.
class CountingPolicy final : public AgentPolicy {
public:
    std::function<std::string(const SelectionContext&)> pick = [](const SelectionContext& c) { return c.candidates.front(); };
    std::optional<Timestamp> time;
    std::atomic<int> reflect_calls{0}, select_calls{0};

    std::string name() const override { return "counting"; }
    AgentAction select_destination(const SelectionContext& ctx) override
    {
        ++select_calls;
        AgentAction a;
        a.chosen_dst = pick(ctx);
        a.timestamp = time;
        a.label = "5";
        a.edge_text = "t";
        return a;
    }
    NodeRecord generate_node(const NodeContext& ctx) override { return {"", ctx.role, "n", NodeOrigin::generated}; }
    std::string reflect(const NodeMemory&) override
    {
        ++reflect_calls;
        return "summary";
    }
};

} // namespace

TEST(Memory, IsolatedNodeAndSingleEdge)
{
    auto g = DyTag::build({{"a", NodeRole::both, "A", NodeOrigin::dataset},
                           {"b", NodeRole::both, "B", NodeOrigin::dataset},
                           {"z", NodeRole::both, "Z", NodeOrigin::dataset}},
                          {{"a", "b", Timestamp{std::int64_t{5}}, "x", "hello"}}, false);
    GenConfig cfg;
    Rng rng(1);
    EXPECT_TRUE(build_memory(g, "z", cfg, rng).entries.empty());
    const auto m = build_memory(g, "a", cfg, rng);
    ASSERT_EQ(m.entries.size(), 1u); // 100 walk steps over one edge collapse to one record
    EXPECT_EQ(m.entries[0].counterpart, "b");
    EXPECT_EQ(m.entries[0].text, "hello");
    EXPECT_EQ(m.serialize(), "time 5: b (B) [x] hello\n");
}

TEST(Memory, WalkMatchesIndependentSimulation)
{
    const auto g = fixtures::make_fixture({300, 30, 20, true, 3, 1.0});
    GenConfig cfg;
    cfg.walks = 4;
    cfg.walk_len = 6;
    cfg.memory_cap_chars = 1u << 20;

    // Adjacency rebuilt from the raw edge list.
    std::map<std::string, std::vector<std::size_t>> adj;
    for (std::size_t i = 0; i < g.num_edges(); ++i) {
        adj[g.edges()[i].src].push_back(i);
        if (g.edges()[i].dst != g.edges()[i].src) adj[g.edges()[i].dst].push_back(i);
    }
    for (const std::string owner : {"u0", "u7", "p3"}) {
        Rng a(42), b(42);
        const auto m = build_memory(g, owner, cfg, a);
        std::vector<std::pair<std::string, Timestamp>> expected;
        std::set<std::pair<std::string, Timestamp>> seen;
        for (std::size_t w = 0; w < cfg.walks; ++w) {
            std::string cur = owner;
            for (std::size_t s = 0; s < cfg.walk_len; ++s) {
                const auto& list = adj[cur];
                if (list.empty()) break;
                const auto& e = g.edges()[list[uniform_index(b, list.size())]];
                std::string cp = e.src == owner ? e.dst : (e.dst == owner ? e.src : e.dst);
                if (seen.emplace(cp, e.timestamp).second) expected.emplace_back(cp, e.timestamp);
                cur = e.src == cur ? e.dst : e.src;
            }
        }
        ASSERT_EQ(m.entries.size(), expected.size()) << owner;
        for (std::size_t i = 0; i < expected.size(); ++i) {
            EXPECT_EQ(m.entries[i].counterpart, expected[i].first);
            EXPECT_EQ(m.entries[i].timestamp, expected[i].second);
        }
    }
}

TEST(Memory, TruncationKeepsNewestWithinCap)
{
    const auto g = fixtures::make_fixture({500, 10, 40, true, 5, 1.0});
    GenConfig cfg;
    cfg.memory_cap_chars = 300;
    Rng rng(3);
    const auto m = build_memory(g, "u1", cfg, rng);
    ASSERT_FALSE(m.entries.empty());
    EXPECT_LE(m.serialized_chars(), 300u);

    cfg.memory_cap_chars = 1u << 20;
    Rng rng2(3);
    const auto full = build_memory(g, "u1", cfg, rng2);
    ASSERT_GT(full.entries.size(), m.entries.size());
    auto oldest_kept = m.entries.front().timestamp;
    for (const auto& e : m.entries) oldest_kept = std::min(oldest_kept, e.timestamp, [](auto x, auto y) { return x < y; });
    for (const auto& e : full.entries)
        if (std::find(m.entries.begin(), m.entries.end(), e) == m.entries.end())
            EXPECT_FALSE(oldest_kept < e.timestamp) << "evicted an entry newer than one kept";
}

TEST(Recall, HistoryFirstThenDegreeThenSample)
{
    const auto g = fixtures::make_fixture({400, 20, 30, true, 9, 1.2});
    std::vector<std::string> pool;
    for (int i = 0; i < 30; ++i) pool.push_back("p" + std::to_string(i));
    const GraphIndex index(g);
    Rng rng(5);
    const auto c = recall_candidates(g, index, "u4", pool, 10, rng);
    ASSERT_EQ(c.size(), 10u);
    EXPECT_EQ(std::set<std::string>(c.begin(), c.end()).size(), 10u);

    // Oracle: u4's distinct destinations, newest first.
    std::vector<std::string> history;
    for (auto it = g.edges().rbegin(); it != g.edges().rend(); ++it)
        if (it->src == "u4" && std::find(history.begin(), history.end(), it->dst) == history.end())
            history.push_back(it->dst);
    const auto h = std::min<std::size_t>(history.size(), 10);
    for (std::size_t i = 0; i < h; ++i) EXPECT_EQ(c[i], history[i]);

    if (h < 10) {
        std::map<std::string, int> deg;
        for (const auto& e : g.edges()) ++deg[e.dst];
        std::vector<std::string> by_degree;
        for (const auto& p : pool)
            if (std::find(history.begin(), history.begin() + h, p) == history.begin() + h) by_degree.push_back(p);
        std::stable_sort(by_degree.begin(), by_degree.end(), [&](auto& a, auto& b) { return deg[a] > deg[b]; });
        const auto budget = std::min<std::size_t>(10 - h, 5);
        for (std::size_t i = 0; i < budget; ++i) EXPECT_EQ(c[h + i], by_degree[i]);
    }
}

TEST(Recall, SmallPoolAndSourceExclusion)
{
    const auto g = fixtures::make_star(4);
    std::vector<std::string> pool{"c", "s1", "s2"};
    Rng rng(1);
    auto c = recall_candidates(g, "c", pool, 10, rng);
    EXPECT_EQ(std::set<std::string>(c.begin(), c.end()), (std::set<std::string>{"s1", "s2"}));
    EXPECT_EQ(c[0], "s2"); // most recent history first
    Rng rng2(1);
    c = recall_candidates(g, "c", pool, 10, rng2, {false});
    EXPECT_EQ(c.size(), 3u);
}

TEST(Recall, RecencyPolicyPicksRankOne)
{
    const auto g = fixtures::make_fixture({200, 10, 20, true, 2, 1.0});
    std::vector<std::string> pool;
    for (int i = 0; i < 20; ++i) pool.push_back("p" + std::to_string(i));
    Rng rng(8);
    const auto c = recall_candidates(g, "u3", pool, 10, rng);
    NodeMemory m{"u3", {}, std::nullopt};
    RecencyPolicy p;
    const SelectionContext ctx{g, g.node("u3"), m, c, Timestamp{std::int64_t{0}}, 2.0, 0, 0, 0, 1};
    const auto a = p.select_destination(ctx);
    EXPECT_EQ(a.chosen_dst, c[0]);
    // u3's latest destination in the stream.
    for (auto it = g.edges().rbegin(); it != g.edges().rend(); ++it)
        if (it->src == "u3") {
            EXPECT_EQ(a.chosen_dst, it->dst);
            break;
        }
}

TEST(NodeRates, BlocksOfFirstAppearances)
{
    // Every 50-edge block introduces 27 new sources and 4 new destinations.
    std::vector<NodeRecord> nodes;
    std::vector<TemporalEdge> edges;
    int next_src = 0, next_dst = 0;
    std::int64_t t = 0;
    for (int b = 0; b < 20; ++b) {
        const int dst_base = next_dst;
        for (int i = 0; i < 4; ++i) nodes.push_back({"d" + std::to_string(next_dst++), NodeRole::destination, "", NodeOrigin::dataset});
        for (int i = 0; i < 50; ++i) {
            std::string src;
            if (i < 27) {
                src = "s" + std::to_string(next_src++);
                nodes.push_back({src, NodeRole::source, "", NodeOrigin::dataset});
            } else {
                src = "s" + std::to_string(next_src - 1 - i % 27);
            }
            edges.push_back({src, "d" + std::to_string(dst_base + i % 4), Timestamp{t++}, "1", ""});
        }
    }
    const auto g = DyTag::build(nodes, edges, true);
    ASSERT_EQ(g.num_edges(), 1000u);
    EXPECT_EQ(derive_node_rates(g, 50), (NodeRates{27, 4}));
    // A stream shorter than one block counts as a single partial block.
    const auto head = slice_seed(g, 30).seed;
    EXPECT_EQ(derive_node_rates(head, 50), (NodeRates{27, 4}));
}

TEST(MedianGap, OddAndEven)
{
    EXPECT_DOUBLE_EQ(median_gap(fixtures::make_from_pairs(3, {{0, 1}, {1, 2}, {0, 2}})), 1.0);
    auto g = DyTag::build({{"a", NodeRole::both, "", NodeOrigin::dataset}},
                          {{"a", "a", Timestamp{std::int64_t{0}}, "", ""},
                           {"a", "a", Timestamp{std::int64_t{1}}, "", ""},
                           {"a", "a", Timestamp{std::int64_t{4}}, "", ""},
                           {"a", "a", Timestamp{std::int64_t{10}}, "", ""},
                           {"a", "a", Timestamp{std::int64_t{30}}, "", ""}},
                          false);
    EXPECT_DOUBLE_EQ(median_gap(g), 4.5); // gaps 1,3,6,20
}

TEST(Tdgg, GrowsEdgesOnly)
{
    const auto truth = fixtures::make_fixture({1200, 120, 60, true, 7, 1.1});
    const auto seed = slice_seed(truth, 1000).seed;
    RecencyPolicy policy;
    const auto r = run_tdgg(seed, truth, small_config(2, 50), policy);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.rounds_completed, 2u);
    EXPECT_EQ(r.graph.num_edges(), 1100u);
    EXPECT_EQ(r.graph.nodes(), truth.nodes());
    for (std::size_t i = 0; i < 1000; ++i) EXPECT_EQ(r.graph.edges()[i], seed.edges()[i]);
    for (std::size_t i = 1; i < r.graph.num_edges(); ++i)
        EXPECT_FALSE(r.graph.edges()[i].timestamp < r.graph.edges()[i - 1].timestamp);

    ASSERT_EQ(r.recall_logs.size(), 100u);
    std::multiset<std::string> replayed, expected;
    for (const auto& log : r.recall_logs) {
        const auto& e = r.graph.edges()[log.edge_index];
        EXPECT_EQ(e.src, log.src);
        EXPECT_EQ(e.dst, log.chosen);
        EXPECT_NE(std::find(log.candidates.begin(), log.candidates.end(), log.chosen), log.candidates.end());
        EXPECT_LE(log.candidates.size(), 10u);
        replayed.insert(log.src);
    }
    for (std::size_t i = 1000; i < 1100; ++i) expected.insert(truth.edges()[i].src);
    EXPECT_EQ(replayed, expected);
    EXPECT_EQ(r.manifest["status"], "ok");
    EXPECT_EQ(r.manifest["rounds"].size(), 2u);
}

TEST(Tdgg, ZeroRoundsReturnsSeed)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    RecencyPolicy policy;
    const auto r = run_tdgg(seed, truth, small_config(0, 50), policy);
    EXPECT_TRUE(r.ok);
    EXPECT_EQ(r.graph.edges(), seed.edges());
    const auto ri = run_idgg(seed, small_config(0, 50), policy);
    EXPECT_TRUE(same_edges(ri.graph, seed));
}

TEST(Tdgg, ReplayShortfallFallsBackToUniform)
{
    const auto truth = fixtures::make_fixture({220, 30, 20, true, 4, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    UniformPolicy policy;
    const auto r = run_tdgg(seed, truth, small_config(2, 15), policy);
    ASSERT_TRUE(r.ok);
    EXPECT_EQ(r.graph.num_edges(), 230u);
    EXPECT_EQ(r.manifest["replay_shortfall"], 10);
}

TEST(Idgg, AddsNodesAndEdges)
{
    const auto truth = fixtures::make_fixture({1000, 120, 60, true, 7, 1.1});
    auto cfg = small_config(20, 50);
    cfg.mode = GenMode::idgg;
    cfg.r_src = 3;
    cfg.r_dst = 2;
    RecencyPolicy policy;
    const auto r = run_idgg(truth, cfg, policy);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(r.graph.num_nodes(), truth.num_nodes() + 100);
    EXPECT_EQ(r.graph.num_edges(), truth.num_edges() + 1000);
    const std::regex id_re("G[0-9]{5}");
    std::size_t new_src = 0, new_dst = 0;
    for (std::size_t i = truth.num_nodes(); i < r.graph.num_nodes(); ++i) {
        const auto& n = r.graph.nodes()[i];
        EXPECT_EQ(n.origin, NodeOrigin::generated);
        EXPECT_TRUE(std::regex_match(n.node_id, id_re)) << n.node_id;
        (n.role == NodeRole::source ? new_src : new_dst)++;
    }
    EXPECT_EQ(new_src, 60u);
    EXPECT_EQ(new_dst, 40u);
    EXPECT_EQ(r.manifest["r_src"], 3);
    EXPECT_EQ(r.manifest["r_dst"], 2);
}

TEST(Idgg, DerivesRatesWhenUnset)
{
    const auto truth = fixtures::make_fixture({400, 120, 60, true, 7, 1.1});
    auto cfg = small_config(2, 50);
    cfg.mode = GenMode::idgg;
    RecencyPolicy policy;
    const auto r = run_idgg(truth, cfg, policy);
    const auto rates = derive_node_rates(truth, 50);
    EXPECT_EQ(r.graph.num_nodes(), truth.num_nodes() + 2 * (rates.r_src + rates.r_dst));
}

TEST(Generation, DeterministicAcrossRunsAndJobs)
{
    const auto truth = fixtures::make_fixture({600, 60, 40, true, 13, 1.1});
    const auto seed = slice_seed(truth, 500).seed;
    UniformPolicy policy;
    auto cfg = small_config(2, 50);
    const auto a = run_tdgg(seed, truth, cfg, policy);
    const auto b = run_tdgg(seed, truth, cfg, policy);
    cfg.jobs = 4;
    const auto c = run_tdgg(seed, truth, cfg, policy);
    EXPECT_TRUE(same_edges(a.graph, b.graph));
    EXPECT_TRUE(same_edges(a.graph, c.graph));

    cfg.mode = GenMode::idgg;
    cfg.source_selection = SourceSelection::uniform;
    const auto d = run_idgg(seed, cfg, policy);
    cfg.jobs = 1;
    const auto e = run_idgg(seed, cfg, policy);
    EXPECT_TRUE(same_edges(d.graph, e.graph));
    cfg.rng_seed = 12;
    const auto f = run_idgg(seed, cfg, policy);
    EXPECT_FALSE(same_edges(d.graph, f.graph));
}

TEST(Generation, NonBipartiteExcludesSelfUnlessSeedHasLoops)
{
    const auto truth = fixtures::make_fixture({300, 40, 0, false, 21, 1.0});
    const auto seed = slice_seed(truth, 250).seed;
    UniformPolicy policy;
    bool seed_loops = false;
    for (const auto& e : seed.edges()) seed_loops |= e.src == e.dst;
    const auto r = run_tdgg(seed, truth, small_config(1, 50), policy);
    ASSERT_TRUE(r.ok) << r.error;
    if (!seed_loops)
        for (const auto& log : r.recall_logs)
            EXPECT_EQ(std::count(log.candidates.begin(), log.candidates.end(), log.src), 0);
}

TEST(Generation, TimestampsClampedForward)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 250).seed;
    CountingPolicy policy;
    policy.time = Timestamp{std::int64_t{0}};
    const auto r = run_tdgg(seed, truth, small_config(1, 20), policy);
    ASSERT_TRUE(r.ok);
    const auto seed_max = seed.edges().back().timestamp;
    for (std::size_t i = 250; i < r.graph.num_edges(); ++i) EXPECT_FALSE(r.graph.edges()[i].timestamp < seed_max);
    EXPECT_EQ(r.manifest["rounds"][0]["timestamp_clamps"], 20);

    // Decimal policy times are rounded to the stream's integral kind.
    policy.time = Timestamp{1e9 + 0.6};
    const auto r2 = run_tdgg(seed, truth, small_config(1, 5), policy);
    EXPECT_EQ(r2.graph.edges().back().timestamp, Timestamp{std::int64_t{1000000001}});
    EXPECT_TRUE(r2.graph.edges().back().timestamp.integral());
}

TEST(Generation, InvalidChoiceAbortsRoundAtomically)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    CountingPolicy policy;
    std::atomic<int> round_calls{0};
    policy.pick = [&](const SelectionContext& c) -> std::string {
        if (c.round == 1 && c.slot == 3) return "not-a-node";
        ++round_calls;
        return c.candidates.front();
    };
    const auto r = run_tdgg(seed, truth, small_config(3, 10), policy);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.rounds_completed, 1u);
    EXPECT_EQ(r.graph.num_edges(), 210u);
    EXPECT_NE(r.error.find("recall list"), std::string::npos);
    EXPECT_EQ(r.manifest["status"], "error");
}

TEST(Generation, ReflectionSkipsEmptyMemories)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    CountingPolicy policy;
    auto cfg = small_config(1, 10);
    cfg.reflection = true;
    const auto r = run_tdgg(seed, truth, cfg, policy);
    ASSERT_TRUE(r.ok);
    EXPECT_GT(policy.reflect_calls.load(), 0);

    NodeMemory empty{"x", {}, std::nullopt};
    const int before = policy.reflect_calls;
    EXPECT_TRUE(reflect_memory(policy, empty, 100));
    EXPECT_EQ(policy.reflect_calls.load(), before);
    EXPECT_EQ(empty.prompt_text(), "(no history)");

    NodeMemory one{"x", {{Timestamp{std::int64_t{1}}, "p", "", "5", "great"}}, std::nullopt};
    RecencyPolicy stub;
    EXPECT_TRUE(reflect_memory(stub, one, 100));
    EXPECT_EQ(one.prompt_text(), "5");
}

namespace {

std::vector<std::string> items_in(const std::string& prompt)
{
    std::vector<std::string> ids;
    const std::regex re("Item ID: ([^,\\n]+)");
    for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), re); it != std::sregex_iterator(); ++it)
        ids.push_back((*it)[1]);
    return ids;
}

std::string review_reply(const std::string& item, const std::string& ts)
{
    return "Sure.\n" + nlohmann::json{{"review",
                                       {{"item_id", item},
                                        {"timestamp", ts},
                                        {"rating", 4},
                                        {"review_title", "Nice"},
                                        {"review_text", "Works well"},
                                        {"total_neg_feedback_count", 0},
                                        {"total_pos_feedback_count", 2}}}}
                           .dump();
}

} // namespace

TEST(LlmPolicy, ParsesActionReply)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    llm::ScriptedChatEndpoint ep([](const std::vector<llm::ChatMessage>& m, std::size_t) {
        const auto ids = items_in(m.back().content);
        return review_reply(ids.empty() ? "?" : ids.back(), "999999");
    });
    LlmPolicy policy(ep, llm::sephora_scenario());
    const auto r = run_tdgg(seed, truth, small_config(1, 5), policy);
    ASSERT_TRUE(r.ok) << r.error;
    for (const auto& log : r.recall_logs) {
        const auto& e = r.graph.edges()[log.edge_index];
        EXPECT_EQ(e.dst, log.candidates.back());
        EXPECT_EQ(e.label, "4");
        EXPECT_EQ(e.text, "Nice\nWorks well");
        EXPECT_EQ(e.timestamp, Timestamp{std::int64_t{999999}});
    }
    EXPECT_EQ(policy.stats()["llm_calls"], 5);
    EXPECT_EQ(policy.stats()["fallbacks"], 0);
}

TEST(LlmPolicy, RetriesThenFallsBack)
{
    const auto truth = fixtures::make_fixture({300, 30, 20, true, 1, 1.0});
    const auto seed = slice_seed(truth, 200).seed;
    llm::ScriptedChatEndpoint ep([](const std::vector<llm::ChatMessage>& m, std::size_t call) -> std::string {
        if (call == 0) return "no json here";
        if (call == 1) return review_reply("unknown-item", "1");
        if (call == 2) return review_reply(items_in(m.back().content).front(), "1");
        return "still not json";
    });
    LlmPolicy policy(ep, llm::sephora_scenario(), 3);
    const auto r = run_tdgg(seed, truth, small_config(1, 2), policy);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_EQ(policy.stats()["llm_calls"], 6);
    EXPECT_EQ(policy.stats()["parse_failures"], 5);
    EXPECT_EQ(policy.stats()["fallbacks"], 1);
    for (const auto& log : r.recall_logs) EXPECT_EQ(log.chosen, log.candidates.front());
}

TEST(LlmPolicy, WeiboTwoStepAndNodeGeneration)
{
    const auto truth = fixtures::make_fixture({200, 30, 0, false, 1, 1.0});
    std::string chosen;
    llm::ScriptedChatEndpoint ep([&chosen](const std::vector<llm::ChatMessage>& m, std::size_t) -> std::string {
        const auto& p = m.back().content;
        if (p.find("Item ID:") != std::string::npos) {
            chosen = items_in(p).front();
            return nlohmann::json{{"interact", {{"item_id", chosen}}}}.dump();
        }
        if (p.find("user_name") != std::string::npos)
            return R"({"weibo_user": {"node_id": "G12345", "user_name": "a", "user_source": "b", "user_gender": "f",
                      "user_location": "c", "user_followers": 3, "user_friends": 4, "user_description": "d"}})";
        return nlohmann::json{{"interact",
                               {{"item_id", chosen}, {"timestamp", "x"}, {"label", "repost"}, {"src_text", "hi"}, {"dst_text", ""}}}}
            .dump();
    });
    LlmPolicy policy(ep, llm::weibo_scenario());
    auto cfg = small_config(1, 3);
    cfg.mode = GenMode::idgg;
    cfg.r_src = 1;
    cfg.r_dst = 1;
    const auto r = run_idgg(truth, cfg, policy);
    ASSERT_TRUE(r.ok) << r.error;
    EXPECT_TRUE(r.graph.contains("G12345"));
    EXPECT_NE(r.graph.node("G12345").text.find("user_name: a"), std::string::npos);
    EXPECT_EQ(r.graph.num_nodes(), truth.num_nodes() + 2);
    EXPECT_EQ(policy.stats()["fallbacks"], 0);
    for (std::size_t i = truth.num_edges(); i < r.graph.num_edges(); ++i) {
        EXPECT_EQ(r.graph.edges()[i].label, "repost");
        EXPECT_EQ(r.graph.edges()[i].text, "hi");
    }
}
