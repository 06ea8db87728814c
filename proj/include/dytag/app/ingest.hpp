#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dytag/app/run_config.hpp"
#include "dytag/core/io.hpp"

namespace dytag::app {

struct IngestStats {
    std::size_t nodes = 0;
    std::size_t edges = 0;
    bool bipartite = true;
    bool reordered = false; ///< input edges were not in timestamp order
    std::optional<Timestamp> first, last;
    std::map<std::string, std::size_t> labels;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const
    {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [l, n] : labels) hist[l] = n;
        return {{"num_nodes", nodes},
                {"num_edges", edges},
                {"bipartite", bipartite},
                {"reordered", reordered},
                {"timestamp_span", first ? nlohmann::json{first->to_string(), last->to_string()} : nlohmann::json()},
                {"label_histogram", hist},
                {"warnings", warnings}};
    }
};

namespace detail {

/// Edge rows of a CSV or JSON-lines file with the byte offset of each row.
class EdgeFile {
public:
    explicit EdgeFile(const std::filesystem::path& p) : path_(p), jsonl_(is_jsonl_path(p))
    {
        if (!std::filesystem::exists(p)) throw UsageError("edge file not found: " + p.string());
    }

    template <class Sink>
    void scan(Sink&& sink, std::vector<std::string>* warnings)
    {
        std::ifstream in(path_, std::ios::binary);
        if (!jsonl_) {
            for_each_edge_csv(in, [&](RawEdge&& e, std::uint64_t off) { sink(std::move(e), off); }, ',', warnings);
            return;
        }
        std::string line;
        std::size_t row = 0;
        std::vector<std::string> seen;
        for (;;) {
            const auto off = static_cast<std::uint64_t>(in.tellg());
            if (!std::getline(in, line)) break;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            ++row;
            auto o = parse_line(line, row);
            dytag::detail::warn_extra_json_keys(o, kEdgeColumns, warnings, seen);
            sink(to_raw(o, row), off);
        }
    }

    /// The row starting at `offset`.
    RawEdge read_at(std::uint64_t offset, std::size_t row)
    {
        if (!in_.is_open()) {
            in_.open(path_, std::ios::binary);
            if (!jsonl_) {
                csv::Reader header(in_);
                std::vector<std::string> f;
                header.next(f);
                pos_ = dytag::detail::locate_columns(f, kEdgeColumns, nullptr);
            }
        }
        in_.clear();
        in_.seekg(static_cast<std::streamoff>(offset));
        if (jsonl_) {
            std::string line;
            std::getline(in_, line);
            return to_raw(parse_line(line, row), row);
        }
        csv::Reader reader(in_);
        std::vector<std::string> f;
        reader.next(f);
        return RawEdge{row, std::move(f[pos_[0]]), std::move(f[pos_[1]]), std::move(f[pos_[2]]), std::move(f[pos_[3]]),
                       std::move(f[pos_[4]])};
    }

private:
    static nlohmann::json parse_line(const std::string& line, std::size_t row)
    {
        nlohmann::json o;
        try {
            o = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(row, std::string("invalid JSON: ") + e.what());
        }
        if (!o.is_object()) throw ParseError(row, "expected a JSON object");
        return o;
    }

    static RawEdge to_raw(const nlohmann::json& o, std::size_t row)
    {
        using dytag::detail::json_field;
        return RawEdge{row, json_field(o, "src", row), json_field(o, "dst", row), json_field(o, "ts", row),
                       json_field(o, "label", row), json_field(o, "text", row)};
    }

    std::filesystem::path path_;
    bool jsonl_;
    std::ifstream in_;
    std::array<std::size_t, 5> pos_{};
};

} // namespace detail

/// Validates an edge file against a node file and writes the canonical graph
/// directory. Edge texts are never held in memory all at once: the first pass
/// keeps only (timestamp, byte offset) per edge, the second re-reads each row
/// in timestamp order and writes it out.
inline IngestStats stream_ingest(const std::filesystem::path& edge_path, const std::filesystem::path& node_path,
                                 const std::filesystem::path& out_dir, std::optional<bool> bipartite = std::nullopt)
{
    if (!std::filesystem::exists(node_path)) throw UsageError("node file not found: " + node_path.string());
    detail::EdgeFile edges(edge_path);

    IngestStats stats;
    std::vector<RawNode> node_rows;
    {
        std::ifstream in(node_path, std::ios::binary);
        node_rows = is_jsonl_path(node_path) ? read_nodes_jsonl(in, &stats.warnings)
                                             : read_nodes_csv(in, ',', &stats.warnings);
    }
    const bool bip = bipartite.value_or(
        std::none_of(node_rows.begin(), node_rows.end(), [](const RawNode& n) { return n.role == "both"; }));
    const DyTag registry = registry_from_rows(node_rows, bip);
    node_rows.clear();
    node_rows.shrink_to_fit();

    struct Key {
        Timestamp ts;
        std::uint64_t offset;
        std::size_t row;
    };
    std::vector<Key> keys;
    bool integral = true;
    edges.scan(
        [&](RawEdge&& r, std::uint64_t off) {
            const auto t = Timestamp::parse(r.ts);
            if (!t) throw ParseError(r.row, "timestamp \"" + r.ts + "\" is not a number");
            integral = integral && t->integral();
            registry.check_edge(TemporalEdge{std::move(r.src), std::move(r.dst), *t, {}, {}}, r.row);
            ++stats.labels[r.label];
            if (!keys.empty() && *t < keys.back().ts) stats.reordered = true;
            keys.push_back({*t, off, r.row});
        },
        &stats.warnings);

    if (stats.reordered)
        std::stable_sort(keys.begin(), keys.end(), [](const Key& a, const Key& b) { return a.ts < b.ts; });

    std::filesystem::create_directories(out_dir);
    {
        std::ofstream out(out_dir / "nodes.csv", std::ios::binary);
        write_nodes_csv(out, registry.nodes());
    }
    {
        std::ofstream out(out_dir / "edges.csv", std::ios::binary);
        out << "src,dst,ts,label,text\n";
        for (const auto& k : keys) {
            auto r = edges.read_at(k.offset, k.row);
            const Timestamp t = integral ? k.ts : Timestamp{k.ts.as_double()};
            write_edge_row(out, TemporalEdge{std::move(r.src), std::move(r.dst), t, std::move(r.label), std::move(r.text)});
        }
    }
    nlohmann::json meta{{"bipartite", bip},
                        {"num_nodes", registry.num_nodes()},
                        {"num_edges", keys.size()},
                        {"generated_nodes", nlohmann::json::array()}};
    std::ofstream(out_dir / "meta.json", std::ios::binary) << meta.dump(2) << '\n';

    stats.nodes = registry.num_nodes();
    stats.edges = keys.size();
    stats.bipartite = bip;
    if (!keys.empty()) {
        stats.first = integral ? keys.front().ts : Timestamp{keys.front().ts.as_double()};
        stats.last = integral ? keys.back().ts : Timestamp{keys.back().ts.as_double()};
    }
    std::ofstream(out_dir / "stats.json", std::ios::binary) << stats.to_json().dump(2) << '\n';
    return stats;
}

} // namespace dytag::app
