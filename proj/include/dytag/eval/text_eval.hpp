#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/core/graph.hpp"
#include "dytag/llm/agent_json.hpp"
#include "dytag/llm/chat.hpp"
#include "dytag/llm/prompt.hpp"
#include "dytag/util/parallel.hpp"
#include "dytag/util/rng.hpp"
#include "dytag/util/text.hpp"

namespace dytag {

inline constexpr std::array<std::string_view, 5> kTextCriteria{
    "contextual_fidelity", "personality_depth", "dynamic_adaptability", "immersive_quality", "content_richness"};

class EvalError : public Error {
public:
    using Error::Error;
};

struct TextualSample {
    TemporalEdge edge;
    std::string src_profile;
    std::string dst_profile;
    std::string src_history_excerpt;
};

/// Profile-only sample used by the node mode.
struct NodeSample {
    std::string node_id;
    std::string profile;
    std::string history_excerpt;
};

struct CriterionScores {
    std::array<int, 5> values{1, 1, 1, 1, 1}; ///< kTextCriteria order, each in [1, 5]

    double average() const
    {
        double s = 0;
        for (int v : values) s += v;
        return s / 5.0;
    }

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        for (std::size_t i = 0; i < 5; ++i) j[std::string(kTextCriteria[i])] = values[i];
        j["average"] = average();
        return j;
    }
};

struct TextEvalOptions {
    std::size_t history_cap_chars = 1000;
    std::size_t profile_cap_chars = 1000;
    std::size_t max_samples = 200;
    std::size_t attempts = 3;
    std::size_t jobs = 1;
    std::uint64_t seed = 0;
    bool node_profiles = false; ///< score generated node profiles instead of edges
};

namespace text {

inline constexpr const char* edge_eval = R"tpl(You are an expert judge of synthetic social interaction data. Below is one interaction produced by a simulator, together with the profiles of both participants and what the acting user did before.

Acting user profile:
{src_profile}

Target profile:
{dst_profile}

Earlier interactions of the acting user (newest first):
{history}

Interaction to judge:
time: {timestamp}
label: {label}
text: {text}

Rate the interaction on each criterion with an integer from 1 (poor) to 5 (excellent):
- contextual_fidelity: does the text agree with the participants' profiles and with the earlier interactions?
- personality_depth: does the text carry a distinct voice, preferences and style for this user?
- dynamic_adaptability: does the content fit its moment, following on plausibly from the earlier interactions?
- immersive_quality: would a reader take it for a real post by a real person?
- content_richness: is the text specific and informative rather than generic filler?

Answer with only this JSON object:
{"contextual_fidelity": <1-5>, "personality_depth": <1-5>, "dynamic_adaptability": <1-5>, "immersive_quality": <1-5>, "content_richness": <1-5>}
)tpl";

inline constexpr const char* node_eval = R"tpl(You are an expert judge of synthetic user and item profiles. Below is one profile produced by a simulator and the interactions it took part in.

Profile ({node_id}):
{profile}

Interactions involving this node (newest first):
{history}

Rate the profile on each criterion with an integer from 1 (poor) to 5 (excellent):
- contextual_fidelity: does the profile agree with the interactions it took part in?
- personality_depth: does the profile describe a distinct, detailed identity?
- dynamic_adaptability: do the interactions read as a coherent evolution of this profile over time?
- immersive_quality: would a reader take it for a real account or product listing?
- content_richness: is the profile specific and informative rather than generic filler?

Answer with only this JSON object:
{"contextual_fidelity": <1-5>, "personality_depth": <1-5>, "dynamic_adaptability": <1-5>, "immersive_quality": <1-5>, "content_richness": <1-5>}
)tpl";

} // namespace text

namespace detail {

/// Lines "time T: other [label] text", newest first, for edges of `node`
/// strictly before stream position `before`, cut to `cap` characters.
inline std::string history_excerpt(const DyTag& g, std::string_view node, std::size_t before, std::size_t cap)
{
    std::string out;
    std::size_t chars = 0;
    for (std::size_t i = std::min(before, g.num_edges()); i-- > 0;) {
        const auto& e = g.edges()[i];
        if (e.src != node && e.dst != node) continue;
        const std::string line = "time " + e.timestamp.to_string() + ": " + (e.src == node ? e.dst : e.src) + " ["
                                 + e.label + "] " + e.text + "\n";
        const auto n = utf8_length(line);
        if (chars + n > cap) {
            if (out.empty()) out = std::string(utf8_prefix(line, cap));
            break;
        }
        out += line;
        chars += n;
    }
    return out;
}

inline std::string or_none(const std::string& s) { return s.empty() ? "(none)" : s; }

} // namespace detail

inline TextualSample make_textual_sample(const DyTag& g, std::size_t edge_index, const TextEvalOptions& opts = {})
{
    const auto& e = g.edges().at(edge_index);
    return {e, std::string(utf8_prefix(g.node(e.src).text, opts.profile_cap_chars)),
            std::string(utf8_prefix(g.node(e.dst).text, opts.profile_cap_chars)),
            detail::history_excerpt(g, e.src, edge_index, opts.history_cap_chars)};
}

inline NodeSample make_node_sample(const DyTag& g, std::string_view node_id, const TextEvalOptions& opts = {})
{
    return {std::string(node_id), std::string(utf8_prefix(g.node(node_id).text, opts.profile_cap_chars)),
            detail::history_excerpt(g, node_id, g.num_edges(), opts.history_cap_chars)};
}

/// The history is cut to `history_cap` characters even when the sample's own
/// excerpt is longer.
inline std::string build_eval_prompt(const TextualSample& s, std::size_t history_cap = 1000)
{
    static const llm::PromptTemplate tpl{"eval/edge", text::edge_eval};
    return llm::render_template(tpl, {{"src_profile", detail::or_none(s.src_profile)},
                                      {"dst_profile", detail::or_none(s.dst_profile)},
                                      {"history", detail::or_none(std::string(utf8_prefix(s.src_history_excerpt, history_cap)))},
                                      {"timestamp", s.edge.timestamp.to_string()},
                                      {"label", s.edge.label},
                                      {"text", s.edge.text}});
}

inline std::string build_node_eval_prompt(const NodeSample& s, std::size_t history_cap = 1000)
{
    static const llm::PromptTemplate tpl{"eval/node", text::node_eval};
    return llm::render_template(tpl, {{"node_id", s.node_id},
                                      {"profile", detail::or_none(s.profile)},
                                      {"history", detail::or_none(std::string(utf8_prefix(s.history_excerpt, history_cap)))}});
}

/// Parses the five scores from an evaluator reply; out-of-range values are
/// clamped into [1, 5] and counted in `clamped`.
inline CriterionScores parse_scores(std::string_view reply, std::size_t* clamped = nullptr)
{
    std::vector<llm::FieldSpec> fields;
    for (auto c : kTextCriteria) fields.push_back({std::string(c), llm::FieldType::integer});
    const auto parsed = llm::parse_agent_json(reply, fields);
    CriterionScores s;
    for (std::size_t i = 0; i < 5; ++i) {
        const auto v = parsed.fields[std::string(kTextCriteria[i])].get<long long>();
        s.values[i] = static_cast<int>(std::clamp<long long>(v, 1, 5));
        if (s.values[i] != v) {
            spdlog::warn("evaluator gave {} = {}; clamped to {}", kTextCriteria[i], v, s.values[i]);
            if (clamped) ++*clamped;
        }
    }
    return s;
}

/// Asks the evaluator up to `attempts` times until the reply parses.
/// Endpoint errors propagate; EvalError when no reply parses.
inline CriterionScores score_prompt(llm::ChatEndpoint& evaluator, const std::string& prompt, std::size_t attempts = 3,
                                    std::size_t* clamped = nullptr)
{
    std::string last;
    for (std::size_t a = 0; a < std::max<std::size_t>(1, attempts); ++a) {
        const auto reply = evaluator.chat({{"user", prompt}});
        try {
            return parse_scores(reply.content, clamped);
        } catch (const llm::ReplyParseError& e) {
            last = e.what();
            spdlog::debug("evaluator reply unusable (attempt {}): {}", a + 1, last);
        }
    }
    throw EvalError("evaluator reply unparseable after " + std::to_string(attempts) + " attempts: " + last);
}

inline CriterionScores score_sample(llm::ChatEndpoint& evaluator, const TextualSample& s, std::size_t attempts = 3,
                                    std::size_t* clamped = nullptr, std::size_t history_cap = 1000)
{
    return score_prompt(evaluator, build_eval_prompt(s, history_cap), attempts, clamped);
}

struct TextAggregate {
    std::array<double, 5> means{};
    double average = 0;
    std::size_t count = 0;

    nlohmann::json to_json() const
    {
        nlohmann::json j;
        for (std::size_t i = 0; i < 5; ++i) j[std::string(kTextCriteria[i])] = means[i];
        j["average"] = average;
        j["samples"] = count;
        return j;
    }
};

inline TextAggregate aggregate_scores(std::span<const CriterionScores> scores)
{
    if (scores.empty()) throw InvalidArgument("aggregate_scores: no scores");
    TextAggregate a;
    a.count = scores.size();
    for (std::size_t c = 0; c < 5; ++c) {
        // Integer sums keep the result independent of sample order.
        long long sum = 0;
        for (const auto& s : scores) sum += s.values[c];
        a.means[c] = static_cast<double>(sum) / static_cast<double>(scores.size());
    }
    a.average = (a.means[0] + a.means[1] + a.means[2] + a.means[3] + a.means[4]) / 5.0;
    return a;
}

/// Sorted, seeded uniform sample of min(max_samples, |candidates|) positions.
inline std::vector<std::size_t> sample_positions(std::size_t n, std::size_t max_samples, std::uint64_t seed)
{
    auto rng = substream(seed, "text-eval");
    auto idx = sample_without_replacement(rng, n, std::min(n, max_samples));
    std::sort(idx.begin(), idx.end());
    return idx;
}

struct TextEvalReport {
    TextAggregate aggregate;
    std::size_t clamp_warnings = 0;
    std::size_t failed_samples = 0;
    std::string mode = "edges";

    nlohmann::json to_json() const
    {
        auto j = aggregate.to_json();
        j["clamp_warnings"] = clamp_warnings;
        j["failed_samples"] = failed_samples;
        j["mode"] = mode;
        return j;
    }
};

/// Scores generated edges (positions >= first_generated) or, in node mode,
/// generated nodes (all nodes when none are marked generated). Samples that
/// never yield a parseable reply are dropped and counted; EvalError when
/// every sample fails.
inline TextEvalReport evaluate_text(llm::ChatEndpoint& evaluator, const DyTag& g, std::size_t first_generated,
                                    const TextEvalOptions& opts = {})
{
    std::vector<std::string> prompts;
    TextEvalReport report;
    if (opts.node_profiles) {
        report.mode = "nodes";
        std::vector<std::string> ids;
        for (const auto& n : g.nodes())
            if (n.origin == NodeOrigin::generated) ids.push_back(n.node_id);
        if (ids.empty())
            for (const auto& n : g.nodes()) ids.push_back(n.node_id);
        for (auto i : sample_positions(ids.size(), opts.max_samples, opts.seed))
            prompts.push_back(build_node_eval_prompt(make_node_sample(g, ids[i], opts), opts.history_cap_chars));
    } else {
        if (first_generated >= g.num_edges()) throw InvalidArgument("evaluate_text: no generated edges to score");
        for (auto i : sample_positions(g.num_edges() - first_generated, opts.max_samples, opts.seed))
            prompts.push_back(build_eval_prompt(make_textual_sample(g, first_generated + i, opts), opts.history_cap_chars));
    }

    std::vector<std::optional<CriterionScores>> results(prompts.size());
    std::vector<std::size_t> clamps(prompts.size(), 0);
    parallel_for(prompts.size(), opts.jobs, [&](std::size_t i) {
        try {
            results[i] = score_prompt(evaluator, prompts[i], opts.attempts, &clamps[i]);
        } catch (const EvalError& e) {
            spdlog::warn("text sample {} dropped: {}", i, e.what());
        }
    });
    std::vector<CriterionScores> ok;
    for (std::size_t i = 0; i < results.size(); ++i) {
        report.clamp_warnings += clamps[i];
        if (results[i])
            ok.push_back(*results[i]);
        else
            ++report.failed_samples;
    }
    if (ok.empty()) throw EvalError("every text sample failed to score");
    report.aggregate = aggregate_scores(ok);
    return report;
}

} // namespace dytag
