#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/app/ingest.hpp"
#include "dytag/app/run_config.hpp"
#include "dytag/core/io.hpp"
#include "dytag/embed/graph_embedding.hpp"
#include "dytag/embed/text_encoder.hpp"
#include "dytag/eval/disc_metrics.hpp"
#include "dytag/eval/text_eval.hpp"
#include "dytag/gen/engine.hpp"
#include "dytag/gen/llm_policy.hpp"
#include "dytag/llm/http_client.hpp"
#include "dytag/metrics/structural.hpp"

namespace dytag::app {

namespace fs = std::filesystem;

inline void write_json(const fs::path& p, const nlohmann::json& j)
{
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << j.dump(2) << '\n';
}

inline nlohmann::json read_json(const fs::path& p)
{
    if (!fs::exists(p)) throw UsageError("file not found: " + p.string());
    std::ifstream in(p);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw UsageError(p.string() + " is not valid JSON: " + e.what());
    }
}

inline DyTag load_graph_dir_checked(const fs::path& dir, std::string_view what)
{
    if (!fs::is_directory(dir)) throw UsageError(std::string(what) + " directory not found: " + dir.string());
    return load_graph_dir(dir);
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    fs::path edges, nodes, out;
    std::optional<bool> bipartite;
};

inline int cmd_ingest(const IngestArgs& a, std::ostream& out)
{
    const auto stats = stream_ingest(a.edges, a.nodes, a.out, a.bipartite);
    out << stats.to_json().dump(2) << '\n';
    return 0;
}

struct SliceArgs {
    fs::path graph, out;
    std::size_t edges = 1000;
};

inline int cmd_slice_seed(const SliceArgs& a, std::ostream& out)
{
    const auto g = load_graph_dir_checked(a.graph, "graph");
    if (a.edges == 0 || a.edges > g.num_edges())
        throw UsageError("--edges must be in [1, " + std::to_string(g.num_edges()) + "]");
    const auto split = slice_seed(g, a.edges);
    save_graph_dir(a.out, split.seed);
    out << nlohmann::json{{"seed_edges", split.seed.num_edges()},
                          {"seed_nodes", split.seed.num_nodes()},
                          {"out", a.out.string()}}
               .dump(2)
        << '\n';
    return 0;
}

// ---------------------------------------------------------------------------

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
};

inline void apply_overrides(RunConfig& c, const Overrides& o)
{
    if (o.seed) c.rng_seed = *o.seed;
    if (o.jobs) c.jobs = *o.jobs;
    c.validate();
}

/// Owns whatever the selected policy depends on.
struct PolicyBundle {
    std::unique_ptr<llm::ChatEndpoint> endpoint;
    std::unique_ptr<AgentPolicy> policy;
};

inline PolicyBundle make_policy(const RunConfig& c)
{
    PolicyBundle b;
    if (c.policy.policy == "stub-recency") {
        b.policy = std::make_unique<RecencyPolicy>();
    } else if (c.policy.policy == "stub-uniform") {
        b.policy = std::make_unique<UniformPolicy>();
    } else {
        auto cfg = c.endpoint;
        cfg.apply_env();
        b.endpoint = std::make_unique<llm::HttpChatClient>(cfg);
        b.policy = std::make_unique<LlmPolicy>(*b.endpoint, llm::scenario_by_name(c.policy.scenario, c.policy.dataset),
                                               c.generation.policy_attempts);
    }
    return b;
}

struct GenerateArgs {
    fs::path config;
    Overrides overrides;
    std::optional<fs::path> out, seed_graph, truth_graph;
};

/// Output layout: graph/ (edges.csv, nodes.csv, meta.json), recall_logs.jsonl,
/// manifest.json, config.resolved.json and timings.json. Everything except
/// timings.json is a pure function of the resolved config and inputs.
inline int cmd_generate(const GenerateArgs& a, std::ostream& out)
{
    auto cfg = load_run_config(a.config);
    if (a.out) cfg.paths.output_dir = a.out->string();
    if (a.seed_graph) cfg.paths.seed_graph = a.seed_graph->string();
    if (a.truth_graph) cfg.paths.truth_graph = a.truth_graph->string();
    apply_overrides(cfg, a.overrides);
    if (cfg.paths.output_dir.empty()) throw UsageError("no output directory (paths.output_dir or --out)");

    std::optional<DyTag> truth;
    if (!cfg.paths.truth_graph.empty()) truth = load_graph_dir_checked(cfg.paths.truth_graph, "truth graph");
    DyTag seed;
    if (!cfg.paths.seed_graph.empty()) {
        seed = load_graph_dir_checked(cfg.paths.seed_graph, "seed graph");
    } else if (truth) {
        if (cfg.generation.seed_edges == 0 || cfg.generation.seed_edges > truth->num_edges())
            throw UsageError("generation.seed_edges must be in [1, " + std::to_string(truth->num_edges()) + "]");
        seed = slice_seed(*truth, cfg.generation.seed_edges).seed;
    } else {
        throw UsageError("no seed graph (paths.seed_graph) or truth graph (paths.truth_graph) given");
    }
    if (cfg.generation.mode == GenMode::tdgg && !truth) throw UsageError("tdgg mode needs paths.truth_graph");

    const fs::path dir = cfg.paths.output_dir;
    fs::create_directories(dir);
    write_json(dir / "config.resolved.json", to_json(cfg));

    auto bundle = make_policy(cfg);
    const auto gen_cfg = cfg.resolved_generation();
    auto result = run_generation(seed, truth ? &*truth : nullptr, gen_cfg, *bundle.policy);

    save_graph_dir(dir / "graph", result.graph);
    {
        std::ofstream logs(dir / "recall_logs.jsonl", std::ios::binary);
        for (const auto& l : result.recall_logs) logs << l.to_json().dump() << '\n';
    }
    write_json(dir / "manifest.json", result.manifest);
    write_json(dir / "timings.json", {{"round_ms", result.round_ms}});

    out << nlohmann::json{{"status", result.manifest["status"]},
                          {"output_edges", result.graph.num_edges()},
                          {"output_nodes", result.graph.num_nodes()},
                          {"rounds_completed", result.rounds_completed},
                          {"out", dir.string()}}
               .dump(2)
        << '\n';
    if (!result.ok) {
        spdlog::error("generation stopped: {}", result.error);
        return 1;
    }
    return 0;
}

// ---------------------------------------------------------------------------

struct EvaluateArgs {
    fs::path generated, truth;
    std::optional<fs::path> config, out, recall_logs;
    std::optional<std::vector<std::string>> suites;
    std::optional<std::size_t> seed_edges;
    Overrides overrides;
};

inline std::vector<RecallLog> read_recall_logs(const fs::path& p)
{
    if (!fs::exists(p)) throw UsageError("recall log file not found: " + p.string());
    std::ifstream in(p);
    std::vector<RecallLog> logs;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        try {
            logs.push_back(RecallLog::from_json(nlohmann::json::parse(line)));
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(row, std::string("bad recall log: ") + e.what());
        }
    }
    return logs;
}

/// The ground truth cut to its first n edges over its full node registry.
inline DyTag truncate_edges(const DyTag& g, std::size_t n)
{
    n = std::min(n, g.num_edges());
    return DyTag::build(g.nodes(), {g.edges().begin(), g.edges().begin() + static_cast<std::ptrdiff_t>(n)}, g.bipartite());
}

/// One suite's section of the report; failures are recorded, not thrown.
template <class Fn>
nlohmann::json run_suite(const std::string& name, Fn&& fn)
{
    const auto t0 = std::chrono::steady_clock::now();
    nlohmann::json j;
    try {
        j = fn();
        j["status"] = "ok";
    } catch (const std::exception& e) {
        spdlog::error("{} suite failed: {}", name, e.what());
        j = {{"status", "error"}, {"error", e.what()}};
    }
    spdlog::info("{} suite: {:.1f} s", name,
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    return j;
}

/// `generated` is either a graph directory or a generate output directory
/// (graph/ plus recall_logs.jsonl and manifest.json). The ground truth is cut
/// to the generated edge count; the first seed_edges edges of both streams
/// are excluded from the discriminative suite.
inline nlohmann::json evaluate(const EvaluateArgs& a, RunConfig& cfg)
{
    if (a.config) cfg = load_run_config(*a.config);
    apply_overrides(cfg, a.overrides);
    if (a.suites) cfg.evaluation.suites = *a.suites;
    cfg.validate();
    if (cfg.evaluation.suites.empty()) throw UsageError("no evaluation suites requested");

    const bool run_dir = fs::is_directory(a.generated / "graph");
    const auto gen = load_graph_dir_checked(run_dir ? a.generated / "graph" : a.generated, "generated graph");
    const auto full_truth = load_graph_dir_checked(a.truth, "truth graph");
    const auto truth = truncate_edges(full_truth, gen.num_edges());

    std::size_t skip = cfg.generation.seed_edges;
    std::vector<RecallLog> logs;
    if (run_dir && fs::exists(a.generated / "manifest.json"))
        skip = read_json(a.generated / "manifest.json").value("seed_edges", skip);
    if (a.seed_edges) skip = *a.seed_edges;
    if (a.recall_logs)
        logs = read_recall_logs(*a.recall_logs);
    else if (run_dir && fs::exists(a.generated / "recall_logs.jsonl"))
        logs = read_recall_logs(a.generated / "recall_logs.jsonl");

    nlohmann::json report{{"generated", {{"num_nodes", gen.num_nodes()}, {"num_edges", gen.num_edges()}}},
                          {"truth",
                           {{"num_nodes", truth.num_nodes()},
                            {"num_edges", truth.num_edges()},
                            {"full_num_edges", full_truth.num_edges()}}},
                          {"seed_edges", skip},
                          {"rng_seed", cfg.rng_seed},
                          {"suites", nlohmann::json::object()}};
    auto& suites = report["suites"];
    for (const auto& s : cfg.evaluation.suites) {
        if (s == "structural") {
            suites[s] = run_suite(s, [&] {
                return structural_report(gen, truth, cfg.structural.mmd, cfg.structural.k_min).to_json();
            });
        } else if (s == "embedding") {
            suites[s] = run_suite(s, [&] {
                HashedTextEncoder enc(cfg.embedding.text_dim);
                std::optional<PrecomputedNodeVectors> vectors;
                if (!cfg.paths.node_vectors.empty()) vectors = PrecomputedNodeVectors::load_jsonl(cfg.paths.node_vectors);
                EmbeddingOptions opts;
                opts.k_rows = cfg.embedding.k_rows;
                opts.d_cols = cfg.embedding.d_cols;
                opts.seed = cfg.rng_seed;
                opts.jobs = cfg.jobs;
                opts.cached_columns = cfg.embedding.cached_columns;
                opts.node_vectors = vectors ? &*vectors : nullptr;
                return embedding_report(gen, truth, enc, opts).to_json();
            });
        } else if (s == "discriminative") {
            suites[s] = run_suite(s, [&] {
                if (skip >= gen.num_edges())
                    throw InvalidArgument("seed_edges (" + std::to_string(skip) + ") leaves no generated edges");
                return discriminative_report(gen, truth, skip, logs, cfg.evaluation.hub_k).to_json();
            });
        } else if (s == "textual") {
            suites[s] = run_suite(s, [&] {
                auto ecfg = cfg.evaluator;
                ecfg.apply_env();
                llm::HttpChatClient client(ecfg);
                TextEvalOptions opts;
                opts.history_cap_chars = cfg.evaluation.history_cap_chars;
                opts.max_samples = cfg.evaluation.text_samples;
                opts.attempts = cfg.evaluation.attempts;
                opts.jobs = std::max<std::size_t>(cfg.jobs, static_cast<std::size_t>(ecfg.max_in_flight));
                opts.seed = cfg.rng_seed;
                opts.node_profiles = cfg.evaluation.node_profiles;
                return evaluate_text(client, gen, std::min(skip, gen.num_edges()), opts).to_json();
            });
        }
    }
    return report;
}

inline int cmd_evaluate(const EvaluateArgs& a, std::ostream& out)
{
    RunConfig cfg;
    const auto report = evaluate(a, cfg);
    if (a.out) {
        write_json(*a.out, report);
        auto echo = a.out->parent_path() / (a.out->stem().string() + ".config.json");
        write_json(echo, to_json(cfg));
    }
    out << report.dump(2) << '\n';
    for (const auto& [name, s] : report["suites"].items())
        if (s.value("status", "") == "ok") return 0;
    return 1;
}

// ---------------------------------------------------------------------------

namespace detail {

inline std::string fmt(const nlohmann::json& v, int precision = 4)
{
    if (v.is_null()) return "n/a";
    if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        std::ostringstream os;
        os << std::fixed << std::setprecision(precision) << v.get<double>();
        return os.str();
    }
    return v.is_string() ? v.get<std::string>() : v.dump();
}

inline void table(std::ostream& out, const std::vector<std::pair<std::string, std::string>>& rows)
{
    out << "| Metric | Value |\n|---|---|\n";
    for (const auto& [k, v] : rows) out << "| " << k << " | " << v << " |\n";
    out << '\n';
}

inline bool failed(std::ostream& out, const nlohmann::json& s)
{
    if (s.value("status", "ok") == "ok") return false;
    out << "Suite failed: " << s.value("error", "unknown error") << "\n\n";
    return true;
}

} // namespace detail

/// Markdown rendering of an evaluation report.
inline std::string report_markdown(const nlohmann::json& r)
{
    using detail::fmt;
    std::ostringstream out;
    out << "# Evaluation report\n\n";
    out << "Generated: " << fmt(r["generated"]["num_edges"]) << " edges, " << fmt(r["generated"]["num_nodes"])
        << " nodes. Ground truth: " << fmt(r["truth"]["num_edges"]) << " edges. Seed edges: " << fmt(r["seed_edges"])
        << ".\n\n";
    const auto& suites = r["suites"];
    if (suites.contains("structural")) {
        const auto& s = suites["structural"];
        out << "## Structural\n\n";
        if (!detail::failed(out, s))
            detail::table(out, {{"Degree MMD", fmt(s["degree_mmd"])},
                                {"Spectra MMD", fmt(s["spectra_mmd"])},
                                {"D_k", fmt(s["d_k"])},
                                {"α", fmt(s["alpha"])},
                                {"Valid power law", fmt(s["power_law_valid"])}});
    }
    if (suites.contains("embedding")) {
        const auto& s = suites["embedding"];
        out << "## Embedding\n\n";
        if (!detail::failed(out, s))
            detail::table(out, {{"Graph embedding score", fmt(s["graph_embedding_score"], 6)},
                                {"ρ (1 - score)", fmt(s["rho"], 6)},
                                {"Projection", fmt(s["k_rows"]) + " x " + fmt(s["d_cols"])}});
    }
    if (suites.contains("discriminative")) {
        const auto& s = suites["discriminative"];
        out << "## Discriminative\n\n";
        if (!detail::failed(out, s)) {
            detail::table(out, {{"Hit@1", fmt(s["hit1"])},
                                {"Hit@10", fmt(s["hit10"])},
                                {"Weighted precision", fmt(s["weighted_precision"])},
                                {"Weighted recall", fmt(s["weighted_recall"])},
                                {"Weighted F1", fmt(s["weighted_f1"])},
                                {"Matched edges", fmt(s["matched"])},
                                {"Unmatched (generated / truth)",
                                 fmt(s["unmatched_generated"]) + " / " + fmt(s["unmatched_truth"])}});
            for (const char* key : {"hubs", "generated_hubs"}) {
                if (!s.contains(key) || s[key].empty()) continue;
                out << (std::string(key) == "hubs" ? "Top hubs:\n\n" : "Top generated hubs:\n\n");
                out << "| Node | Degree | Text |\n|---|---|---|\n";
                for (const auto& h : s[key])
                    out << "| " << fmt(h["node_id"]) << " | " << fmt(h["degree"]) << " | " << fmt(h["excerpt"]) << " |\n";
                out << '\n';
            }
        }
    }
    if (suites.contains("textual")) {
        const auto& s = suites["textual"];
        out << "## Textual\n\n";
        if (!detail::failed(out, s)) {
            std::vector<std::pair<std::string, std::string>> rows;
            for (auto c : kTextCriteria) rows.emplace_back(std::string(c), fmt(s[std::string(c)], 2));
            rows.emplace_back("Average", fmt(s["average"], 2));
            rows.emplace_back("Samples", fmt(s["samples"]));
            rows.emplace_back("Clamped scores", fmt(s["clamp_warnings"]));
            detail::table(out, rows);
        }
    }
    return out.str();
}

struct ReportArgs {
    fs::path input;
    bool markdown = false;
};

inline int cmd_report(const ReportArgs& a, std::ostream& out)
{
    const auto r = read_json(a.input);
    if (!r.contains("suites")) throw UsageError(a.input.string() + " is not an evaluation report");
    if (a.markdown)
        out << report_markdown(r);
    else
        out << r.dump(2) << '\n';
    return 0;
}

} // namespace dytag::app
