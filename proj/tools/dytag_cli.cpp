#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>
#include <spdlog/sinks/stdout_color_sinks.h>

#include "dytag/app/commands.hpp"

namespace app = dytag::app;

int main(int argc, char** argv)
{
    auto logger = spdlog::stderr_color_mt("dytag");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%l] %v");
    if (const char* lvl = std::getenv("DYTAG_LOG_LEVEL")) spdlog::set_level(spdlog::level::from_str(lvl));

    CLI::App cli{"Dynamic text-attributed graph generation and evaluation"};
    cli.require_subcommand(1);
    cli.fallthrough();
    cli.set_help_all_flag("--help-all", "Expand all help");

    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    cli.add_option("--seed", seed, "Override rng_seed");
    cli.add_option("--jobs", jobs, "Override worker thread count");

    app::IngestArgs ingest;
    std::string bip;
    auto* c_ingest = cli.add_subcommand("ingest", "Validate raw edge and node files and write a graph directory");
    c_ingest->add_option("--edges", ingest.edges, "Edge file (.csv or .jsonl)")->required();
    c_ingest->add_option("--nodes", ingest.nodes, "Node file (.csv or .jsonl)")->required();
    c_ingest->add_option("--out", ingest.out, "Output graph directory")->required();
    c_ingest->add_option("--bipartite", bip, "auto, true or false")
        ->check(CLI::IsMember({"auto", "true", "false"}))
        ->default_val("auto");

    app::SliceArgs slice;
    auto* c_slice = cli.add_subcommand("slice-seed", "Write the first N edges of a graph as a seed graph");
    c_slice->add_option("--graph", slice.graph, "Graph directory")->required();
    c_slice->add_option("--edges", slice.edges, "Seed edge count")->default_val(1000);
    c_slice->add_option("--out", slice.out, "Output graph directory")->required();

    app::GenerateArgs gen;
    auto* c_gen = cli.add_subcommand("generate", "Grow a seed graph with agent rounds");
    c_gen->add_option("--config", gen.config, "Run configuration JSON")->required();
    c_gen->add_option("--out", gen.out, "Output directory (overrides paths.output_dir)");
    c_gen->add_option("--seed-graph", gen.seed_graph, "Seed graph directory (overrides paths.seed_graph)");
    c_gen->add_option("--truth-graph", gen.truth_graph, "Ground-truth graph directory (overrides paths.truth_graph)");

    app::EvaluateArgs eval;
    auto* c_eval = cli.add_subcommand("evaluate", "Compare a generated graph with the ground truth");
    c_eval->add_option("--generated", eval.generated, "Generated graph or generate output directory")->required();
    c_eval->add_option("--truth", eval.truth, "Ground-truth graph directory")->required();
    c_eval->add_option("--config", eval.config, "Run configuration JSON");
    c_eval->add_option("--out", eval.out, "Report path (defaults to stdout only)");
    c_eval->add_option("--recall-logs", eval.recall_logs, "Recall log JSONL for Hit@k");
    c_eval->add_option("--suites", eval.suites, "structural, embedding, discriminative, textual")->delimiter(',');
    c_eval->add_option("--seed-edges", eval.seed_edges, "Edges excluded from the discriminative suite");

    app::ReportArgs report;
    auto* c_report = cli.add_subcommand("report", "Render an evaluation report");
    c_report->add_option("--input", report.input, "Report JSON")->required();
    c_report->add_flag("--markdown", report.markdown, "Markdown tables instead of JSON");

    try {
        cli.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = cli.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (*c_ingest) {
            if (bip != "auto") ingest.bipartite = bip == "true";
            return app::cmd_ingest(ingest, std::cout);
        }
        if (*c_slice) return app::cmd_slice_seed(slice, std::cout);
        if (*c_gen) {
            gen.overrides = {seed, jobs};
            return app::cmd_generate(gen, std::cout);
        }
        if (*c_eval) {
            eval.overrides = {seed, jobs};
            return app::cmd_evaluate(eval, std::cout);
        }
        if (*c_report) return app::cmd_report(report, std::cout);
    } catch (const app::UsageError& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const dytag::InvalidArgument& e) {
        spdlog::error("{}", e.what());
        return 2;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
    return 2;
}
