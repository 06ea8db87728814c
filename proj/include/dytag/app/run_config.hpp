#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dytag/embed/graph_embedding.hpp"
#include "dytag/gen/config.hpp"
#include "dytag/llm/chat.hpp"
#include "dytag/llm/templates.hpp"
#include "dytag/metrics/mmd.hpp"
#include "dytag/util/error.hpp"

namespace dytag::app {

/// Bad invocation or unusable inputs; the CLI maps it to exit status 2.
class UsageError : public Error {
public:
    using Error::Error;
};

class ConfigError : public UsageError {
public:
    using UsageError::UsageError;
};

struct PathsConfig {
    std::string seed_graph;   ///< graph directory; empty slices it from truth_graph
    std::string truth_graph;  ///< graph directory (TDGG node universe and continuation)
    std::string output_dir;
    std::string node_vectors; ///< optional JSON lines of precomputed node text vectors
};

struct PolicyConfig {
    std::string policy = "stub-recency"; ///< stub-recency, stub-uniform or llm
    std::string scenario = "generic";
    llm::DatasetDescriptor dataset;
};

struct StructuralConfig {
    MmdConfig mmd;
    std::int64_t k_min = 2;
};

struct EmbeddingConfig {
    std::size_t k_rows = 256;
    std::size_t d_cols = 1024;
    std::size_t text_dim = 256;
    std::size_t cached_columns = 8192;
};

struct EvaluationConfig {
    std::vector<std::string> suites{"structural", "embedding", "discriminative"};
    std::size_t text_samples = 200;
    std::size_t history_cap_chars = 1000;
    std::size_t attempts = 3;
    bool node_profiles = false;
    std::size_t hub_k = 10;
};

inline const std::vector<std::string>& known_suites()
{
    static const std::vector<std::string> s{"structural", "embedding", "textual", "discriminative"};
    return s;
}

struct RunConfig {
    std::uint64_t rng_seed = 0;
    std::size_t jobs = 1;
    PathsConfig paths;
    GenConfig generation;
    PolicyConfig policy;
    StructuralConfig structural;
    EmbeddingConfig embedding;
    llm::ChatConfig endpoint;
    llm::ChatConfig evaluator;
    EvaluationConfig evaluation;

    /// Seed and job count are stored once at the top level and copied down.
    GenConfig resolved_generation() const
    {
        auto g = generation;
        g.rng_seed = rng_seed;
        g.jobs = jobs;
        return g;
    }

    void validate() const
    {
        if (jobs == 0) throw ConfigError("jobs must be >= 1");
        try {
            resolved_generation().validate();
            endpoint.validate();
            evaluator.validate();
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
        if (policy.policy != "stub-recency" && policy.policy != "stub-uniform" && policy.policy != "llm")
            throw ConfigError("policy must be stub-recency, stub-uniform or llm (got \"" + policy.policy + "\")");
        if (policy.scenario != "sephora" && policy.scenario != "weibo" && policy.scenario != "generic")
            throw ConfigError("scenario must be sephora, weibo or generic (got \"" + policy.scenario + "\")");
        for (const auto& s : evaluation.suites)
            if (std::find(known_suites().begin(), known_suites().end(), s) == known_suites().end())
                throw ConfigError("unknown evaluation suite \"" + s + "\"");
        if (embedding.k_rows == 0 || embedding.d_cols == 0 || embedding.text_dim == 0)
            throw ConfigError("embedding dimensions must be >= 1");
    }
};

namespace detail {

/// Reads the members of one JSON object, rejecting keys it was not told about.
class ObjectReader {
public:
    ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path))
    {
        if (!j_.is_object()) throw ConfigError(where() + " must be a JSON object");
    }

    template <class T>
    ObjectReader& get(const char* key, T& out)
    {
        allowed_.insert(key);
        if (auto it = j_.find(key); it != j_.end()) {
            try {
                out = it->template get<T>();
            } catch (const nlohmann::json::exception&) {
                throw ConfigError(where(key) + " has the wrong type (" + it->type_name() + ")");
            }
        }
        return *this;
    }

    ObjectReader& path(const char* key, std::filesystem::path& out)
    {
        std::string s = out.string();
        get(key, s);
        out = s;
        return *this;
    }

    template <class Fn>
    ObjectReader& object(const char* key, Fn&& fn)
    {
        allowed_.insert(key);
        if (auto it = j_.find(key); it != j_.end()) {
            ObjectReader sub(*it, dotted(key));
            fn(sub);
            sub.finish();
        }
        return *this;
    }

    void finish() const
    {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!allowed_.contains(it.key())) throw ConfigError("unknown config key " + where(it.key().c_str()));
    }

private:
    std::string dotted(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

    std::string where(const char* key = nullptr) const
    {
        const std::string p = key ? dotted(key) : path_;
        return p.empty() ? "config" : "\"" + p + "\"";
    }

    const nlohmann::json& j_;
    std::string path_;
    std::set<std::string, std::less<>> allowed_;
};

inline void read_chat(ObjectReader& r, llm::ChatConfig& c)
{
    r.get("base_url", c.base_url)
        .get("api_key", c.api_key)
        .get("model", c.model)
        .get("temperature", c.temperature)
        .get("top_p", c.top_p)
        .get("repetition_penalty", c.repetition_penalty)
        .get("max_tokens", c.max_tokens)
        .get("timeout_ms", c.timeout_ms)
        .get("max_retries", c.max_retries)
        .get("backoff_ms", c.backoff_ms)
        .get("max_in_flight", c.max_in_flight)
        .path("cache_dir", c.cache_dir);
}

inline nlohmann::json chat_json(const llm::ChatConfig& c)
{
    // The API key is never echoed.
    return {{"base_url", c.base_url},       {"model", c.model},
            {"temperature", c.temperature}, {"top_p", c.top_p},
            {"repetition_penalty", c.repetition_penalty}, {"max_tokens", c.max_tokens},
            {"timeout_ms", c.timeout_ms},   {"max_retries", c.max_retries},
            {"backoff_ms", c.backoff_ms},   {"max_in_flight", c.max_in_flight},
            {"cache_dir", c.cache_dir.string()}};
}

} // namespace detail

inline RunConfig run_config_from_json(const nlohmann::json& j)
{
    RunConfig c;
    detail::ObjectReader root(j, "");
    root.get("rng_seed", c.rng_seed).get("jobs", c.jobs);
    root.object("paths", [&](auto& r) {
        r.get("seed_graph", c.paths.seed_graph)
            .get("truth_graph", c.paths.truth_graph)
            .get("output_dir", c.paths.output_dir)
            .get("node_vectors", c.paths.node_vectors);
    });
    root.object("generation", [&](auto& r) {
        auto& g = c.generation;
        std::string mode = to_string(g.mode), selection = to_string(g.source_selection);
        r.get("rounds", g.rounds)
            .get("edges_per_round", g.edges_per_round)
            .get("seed_edges", g.seed_edges)
            .get("recall_k", g.recall_k)
            .get("walks", g.walks)
            .get("walk_len", g.walk_len)
            .get("memory_cap_chars", g.memory_cap_chars)
            .get("reflection", g.reflection)
            .get("mode", mode)
            .get("source_selection", selection)
            .get("r_src", g.r_src)
            .get("r_dst", g.r_dst)
            .get("policy_attempts", g.policy_attempts);
        try {
            g.mode = parse_gen_mode(mode);
            g.source_selection = parse_source_selection(selection);
        } catch (const InvalidArgument& e) {
            throw ConfigError(e.what());
        }
    });
    root.object("policy", [&](auto& r) {
        r.get("policy", c.policy.policy).get("scenario", c.policy.scenario);
        r.object("dataset", [&](auto& d) {
            auto& ds = c.policy.dataset;
            d.get("platform", ds.platform)
                .get("agent_description", ds.agent_description)
                .get("source_noun", ds.source_noun)
                .get("source_plural", ds.source_plural)
                .get("destination_noun", ds.destination_noun)
                .get("destination_plural", ds.destination_plural)
                .get("interaction_noun", ds.interaction_noun)
                .get("label_description", ds.label_description);
        });
    });
    root.object("structural", [&](auto& r) {
        std::string mode = c.structural.mmd.smoothing_mode == SmoothingMode::fixed ? "fixed" : "median_heuristic";
        r.get("smoothing", c.structural.mmd.smoothing).get("smoothing_mode", mode).get("k_min", c.structural.k_min);
        if (mode == "fixed")
            c.structural.mmd.smoothing_mode = SmoothingMode::fixed;
        else if (mode == "median_heuristic")
            c.structural.mmd.smoothing_mode = SmoothingMode::median_heuristic;
        else
            throw ConfigError("structural.smoothing_mode must be fixed or median_heuristic");
    });
    root.object("embedding", [&](auto& r) {
        r.get("k_rows", c.embedding.k_rows)
            .get("d_cols", c.embedding.d_cols)
            .get("text_dim", c.embedding.text_dim)
            .get("cached_columns", c.embedding.cached_columns);
    });
    root.object("endpoint", [&](auto& r) { detail::read_chat(r, c.endpoint); });
    root.object("evaluator", [&](auto& r) { detail::read_chat(r, c.evaluator); });
    root.object("evaluation", [&](auto& r) {
        r.get("suites", c.evaluation.suites)
            .get("text_samples", c.evaluation.text_samples)
            .get("history_cap_chars", c.evaluation.history_cap_chars)
            .get("attempts", c.evaluation.attempts)
            .get("node_profiles", c.evaluation.node_profiles)
            .get("hub_k", c.evaluation.hub_k);
    });
    root.finish();
    c.validate();
    return c;
}

inline RunConfig load_run_config(const std::filesystem::path& p)
{
    if (!std::filesystem::exists(p)) throw UsageError("config file not found: " + p.string());
    std::ifstream in(p);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config file " + p.string() + " is not valid JSON: " + e.what());
    }
    return run_config_from_json(j);
}

/// Every field, defaults included; reading it back gives the same config.
inline nlohmann::json to_json(const RunConfig& c)
{
    const auto& g = c.generation;
    const auto& d = c.policy.dataset;
    return {{"rng_seed", c.rng_seed},
            {"jobs", c.jobs},
            {"paths",
             {{"seed_graph", c.paths.seed_graph},
              {"truth_graph", c.paths.truth_graph},
              {"output_dir", c.paths.output_dir},
              {"node_vectors", c.paths.node_vectors}}},
            {"generation",
             {{"rounds", g.rounds},
              {"edges_per_round", g.edges_per_round},
              {"seed_edges", g.seed_edges},
              {"recall_k", g.recall_k},
              {"walks", g.walks},
              {"walk_len", g.walk_len},
              {"memory_cap_chars", g.memory_cap_chars},
              {"reflection", g.reflection},
              {"mode", to_string(g.mode)},
              {"source_selection", to_string(g.source_selection)},
              {"r_src", g.r_src},
              {"r_dst", g.r_dst},
              {"policy_attempts", g.policy_attempts}}},
            {"policy",
             {{"policy", c.policy.policy},
              {"scenario", c.policy.scenario},
              {"dataset",
               {{"platform", d.platform},
                {"agent_description", d.agent_description},
                {"source_noun", d.source_noun},
                {"source_plural", d.source_plural},
                {"destination_noun", d.destination_noun},
                {"destination_plural", d.destination_plural},
                {"interaction_noun", d.interaction_noun},
                {"label_description", d.label_description}}}}},
            {"structural",
             {{"smoothing", c.structural.mmd.smoothing},
              {"smoothing_mode",
               c.structural.mmd.smoothing_mode == SmoothingMode::fixed ? "fixed" : "median_heuristic"},
              {"k_min", c.structural.k_min}}},
            {"embedding",
             {{"k_rows", c.embedding.k_rows},
              {"d_cols", c.embedding.d_cols},
              {"text_dim", c.embedding.text_dim},
              {"cached_columns", c.embedding.cached_columns}}},
            {"endpoint", detail::chat_json(c.endpoint)},
            {"evaluator", detail::chat_json(c.evaluator)},
            {"evaluation",
             {{"suites", c.evaluation.suites},
              {"text_samples", c.evaluation.text_samples},
              {"history_cap_chars", c.evaluation.history_cap_chars},
              {"attempts", c.evaluation.attempts},
              {"node_profiles", c.evaluation.node_profiles},
              {"hub_k", c.evaluation.hub_k}}}};
}

} // namespace dytag::app
