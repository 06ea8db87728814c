#pragma once

#include <array>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/core/csv.hpp"
#include "dytag/core/graph.hpp"

namespace dytag {

/// One edge row as read from a file, before validation. row is 1-based.
struct RawEdge {
    std::size_t row = 0;
    std::string src, dst, ts, label, text;
};

struct RawNode {
    std::size_t row = 0;
    std::string node_id, role, text;
};

inline constexpr std::array<std::string_view, 5> kEdgeColumns{"src", "dst", "ts", "label", "text"};
inline constexpr std::array<std::string_view, 3> kNodeColumns{"node_id", "role", "text"};

namespace detail {

/// Maps required column names to header positions; extra columns are
/// reported through `on_extra` and otherwise ignored.
template <std::size_t N>
std::array<std::size_t, N> locate_columns(const std::vector<std::string>& header,
                                          const std::array<std::string_view, N>& required,
                                          std::vector<std::string>* warnings)
{
    std::array<std::size_t, N> pos{};
    std::array<bool, N> found{};
    for (std::size_t c = 0; c < header.size(); ++c) {
        std::string_view name = header[c];
        if (c == 0 && name.starts_with("\xEF\xBB\xBF")) name.remove_prefix(3); // UTF-8 BOM
        bool known = false;
        for (std::size_t k = 0; k < N; ++k) {
            if (name == required[k] && !found[k]) {
                pos[k] = c;
                found[k] = true;
                known = true;
            }
        }
        if (!known) {
            std::string msg = "ignoring unknown column \"" + std::string(name) + "\"";
            spdlog::warn(msg);
            if (warnings) warnings->push_back(std::move(msg));
        }
    }
    for (std::size_t k = 0; k < N; ++k)
        if (!found[k]) throw ParseError(0, "header is missing column \"" + std::string(required[k]) + "\"");
    return pos;
}

inline bool blank_record(const std::vector<std::string>& f) { return f.size() == 1 && f[0].empty(); }

} // namespace detail

/// Streams edge rows from a delimiter-separated file with a header row.
/// Calls sink(raw, record_offset) per data row.
inline void for_each_edge_csv(std::istream& in, const std::function<void(RawEdge&&, std::uint64_t)>& sink,
                              char delim = ',', std::vector<std::string>* warnings = nullptr)
{
    csv::Reader reader(in, delim);
    std::vector<std::string> f;
    if (!reader.next(f)) throw ParseError(0, "edge file is empty");
    const auto pos = detail::locate_columns(f, kEdgeColumns, warnings);
    std::size_t row = 0;
    while (reader.next(f)) {
        if (detail::blank_record(f)) continue;
        ++row;
        for (auto p : pos)
            if (p >= f.size())
                throw ParseError(row, "expected at least " + std::to_string(p + 1) + " fields, got "
                                          + std::to_string(f.size()));
        sink(RawEdge{row, std::move(f[pos[0]]), std::move(f[pos[1]]), std::move(f[pos[2]]),
                     std::move(f[pos[3]]), std::move(f[pos[4]])},
             reader.record_offset());
    }
}

inline std::vector<RawEdge> read_edges_csv(std::istream& in, char delim = ',',
                                           std::vector<std::string>* warnings = nullptr)
{
    std::vector<RawEdge> out;
    for_each_edge_csv(in, [&](RawEdge&& e, std::uint64_t) { out.push_back(std::move(e)); }, delim, warnings);
    return out;
}

inline std::vector<RawNode> read_nodes_csv(std::istream& in, char delim = ',',
                                           std::vector<std::string>* warnings = nullptr)
{
    csv::Reader reader(in, delim);
    std::vector<std::string> f;
    if (!reader.next(f)) throw ParseError(0, "node file is empty");
    const auto pos = detail::locate_columns(f, kNodeColumns, warnings);
    std::vector<RawNode> out;
    std::size_t row = 0;
    while (reader.next(f)) {
        if (detail::blank_record(f)) continue;
        ++row;
        for (auto p : pos)
            if (p >= f.size()) throw ParseError(row, "too few fields");
        out.push_back(RawNode{row, std::move(f[pos[0]]), std::move(f[pos[1]]), std::move(f[pos[2]])});
    }
    return out;
}

namespace detail {

inline std::string json_field(const nlohmann::json& obj, std::string_view key, std::size_t row)
{
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(row, "missing field \"" + std::string(key) + "\"");
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_number()) return Timestamp{it->get<double>()}.to_string();
    throw ParseError(row, "field \"" + std::string(key) + "\" must be a string or number");
}

template <std::size_t N>
void warn_extra_json_keys(const nlohmann::json& obj, const std::array<std::string_view, N>& known,
                          std::vector<std::string>* warnings, std::vector<std::string>& seen)
{
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) != known.end()) continue;
        if (std::find(seen.begin(), seen.end(), it.key()) != seen.end()) continue;
        seen.push_back(it.key());
        std::string msg = "ignoring unknown field \"" + it.key() + "\"";
        spdlog::warn(msg);
        if (warnings) warnings->push_back(std::move(msg));
    }
}

template <class Fn>
void for_each_json_line(std::istream& in, Fn&& fn)
{
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        ++row;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError(row, std::string("invalid JSON: ") + e.what());
        }
        if (!obj.is_object()) throw ParseError(row, "expected a JSON object");
        fn(obj, row);
    }
}

} // namespace detail

inline std::vector<RawEdge> read_edges_jsonl(std::istream& in, std::vector<std::string>* warnings = nullptr)
{
    std::vector<RawEdge> out;
    std::vector<std::string> seen;
    detail::for_each_json_line(in, [&](const nlohmann::json& o, std::size_t row) {
        detail::warn_extra_json_keys(o, kEdgeColumns, warnings, seen);
        out.push_back(RawEdge{row, detail::json_field(o, "src", row), detail::json_field(o, "dst", row),
                              detail::json_field(o, "ts", row), detail::json_field(o, "label", row),
                              detail::json_field(o, "text", row)});
    });
    return out;
}

inline std::vector<RawNode> read_nodes_jsonl(std::istream& in, std::vector<std::string>* warnings = nullptr)
{
    std::vector<RawNode> out;
    std::vector<std::string> seen;
    detail::for_each_json_line(in, [&](const nlohmann::json& o, std::size_t row) {
        detail::warn_extra_json_keys(o, kNodeColumns, warnings, seen);
        out.push_back(RawNode{row, detail::json_field(o, "node_id", row), detail::json_field(o, "role", row),
                              detail::json_field(o, "text", row)});
    });
    return out;
}

/// Node registry from raw rows; roles validated, duplicates rejected.
inline DyTag registry_from_rows(std::span<const RawNode> rows, bool bipartite)
{
    DyTag g(bipartite);
    for (const auto& r : rows) {
        auto role = parse_role(r.role);
        if (!role) throw ParseError(r.row, "unknown role \"" + r.role + "\"");
        g.add_node(NodeRecord{r.node_id, *role, r.text, NodeOrigin::dataset});
    }
    return g;
}

/// Parses timestamps for a whole column: all-integral columns stay integral,
/// otherwise every value is widened to a double.
inline std::vector<Timestamp> parse_timestamp_column(std::span<const RawEdge> rows)
{
    std::vector<Timestamp> ts;
    ts.reserve(rows.size());
    bool all_integral = true;
    for (const auto& r : rows) {
        auto t = Timestamp::parse(r.ts);
        if (!t) throw ParseError(r.row, "timestamp \"" + r.ts + "\" is not a number");
        all_integral = all_integral && t->integral();
        ts.push_back(*t);
    }
    if (!all_integral)
        for (auto& t : ts) t = Timestamp{t.as_double()};
    return ts;
}

/// Validated DyTag from raw edge and node rows. Edges are stably sorted by
/// timestamp. bipartite = nullopt infers it: bipartite iff no node has role both.
inline DyTag parse_edge_stream(std::span<const RawEdge> edge_rows, std::span<const RawNode> node_rows,
                               std::optional<bool> bipartite = std::nullopt)
{
    bool bip = bipartite.value_or(std::none_of(node_rows.begin(), node_rows.end(),
                                               [](const RawNode& n) { return n.role == "both"; }));
    DyTag registry = registry_from_rows(node_rows, bip);
    const auto ts = parse_timestamp_column(edge_rows);

    std::vector<TemporalEdge> edges;
    edges.reserve(edge_rows.size());
    for (std::size_t i = 0; i < edge_rows.size(); ++i) {
        const auto& r = edge_rows[i];
        TemporalEdge e{r.src, r.dst, ts[i], r.label, r.text};
        registry.check_edge(e, r.row);
        edges.push_back(std::move(e));
    }
    return DyTag::build(registry.nodes(), std::move(edges), bip);
}

// ---------------------------------------------------------------------------
// Canonical writers. The text column is always quoted; other fields only when
// they contain the delimiter, a quote or a line break.

inline void write_edge_row(std::ostream& out, const TemporalEdge& e, char delim = ',')
{
    csv::write_field(out, e.src, delim);
    out << delim;
    csv::write_field(out, e.dst, delim);
    out << delim << e.timestamp.to_string() << delim;
    csv::write_field(out, e.label, delim);
    out << delim;
    csv::write_field(out, e.text, delim, true);
    out << '\n';
}

inline void write_edges_csv(std::ostream& out, std::span<const TemporalEdge> edges, char delim = ',')
{
    out << "src" << delim << "dst" << delim << "ts" << delim << "label" << delim << "text\n";
    for (const auto& e : edges) write_edge_row(out, e, delim);
}

inline void write_nodes_csv(std::ostream& out, std::span<const NodeRecord> nodes, char delim = ',')
{
    out << "node_id" << delim << "role" << delim << "text\n";
    for (const auto& n : nodes) {
        csv::write_field(out, n.node_id, delim);
        out << delim << to_string(n.role) << delim;
        csv::write_field(out, n.text, delim, true);
        out << '\n';
    }
}

inline bool is_jsonl_path(const std::filesystem::path& p)
{
    const auto ext = p.extension().string();
    return ext == ".jsonl" || ext == ".ndjson" || ext == ".json";
}

inline std::ifstream open_input(const std::filesystem::path& p, std::string_view what)
{
    if (!std::filesystem::exists(p)) throw Error(std::string(what) + " not found: " + p.string());
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + std::string(what) + ": " + p.string());
    return in;
}

/// Loads a graph from an edge file and a node file (CSV, or JSON lines by extension).
inline DyTag load_graph(const std::filesystem::path& edge_path, const std::filesystem::path& node_path,
                        std::optional<bool> bipartite = std::nullopt, std::vector<std::string>* warnings = nullptr)
{
    auto node_in = open_input(node_path, "node file");
    auto nodes = is_jsonl_path(node_path) ? read_nodes_jsonl(node_in, warnings) : read_nodes_csv(node_in, ',', warnings);
    auto edge_in = open_input(edge_path, "edge file");
    auto edges = is_jsonl_path(edge_path) ? read_edges_jsonl(edge_in, warnings) : read_edges_csv(edge_in, ',', warnings);
    return parse_edge_stream(edges, nodes, bipartite);
}

// A graph directory holds edges.csv, nodes.csv and meta.json. meta.json keeps
// what the CSV pair cannot express: the bipartite flag and node origins.

inline void save_graph_dir(const std::filesystem::path& dir, const DyTag& g)
{
    std::filesystem::create_directories(dir);
    {
        std::ofstream out(dir / "edges.csv", std::ios::binary);
        write_edges_csv(out, g.edges());
    }
    {
        std::ofstream out(dir / "nodes.csv", std::ios::binary);
        write_nodes_csv(out, g.nodes());
    }
    nlohmann::json generated = nlohmann::json::array();
    for (const auto& n : g.nodes())
        if (n.origin == NodeOrigin::generated) generated.push_back(n.node_id);
    nlohmann::json meta{{"bipartite", g.bipartite()},
                        {"num_nodes", g.num_nodes()},
                        {"num_edges", g.num_edges()},
                        {"generated_nodes", generated}};
    std::ofstream(dir / "meta.json", std::ios::binary) << meta.dump(2) << '\n';
}

inline DyTag load_graph_dir(const std::filesystem::path& dir)
{
    if (!std::filesystem::is_directory(dir)) throw Error("graph directory not found: " + dir.string());
    std::optional<bool> bipartite;
    std::vector<std::string> generated;
    if (std::filesystem::exists(dir / "meta.json")) {
        std::ifstream in(dir / "meta.json");
        auto meta = nlohmann::json::parse(in);
        if (meta.contains("bipartite")) bipartite = meta.at("bipartite").get<bool>();
        if (meta.contains("generated_nodes")) generated = meta.at("generated_nodes").get<std::vector<std::string>>();
    }
    DyTag g = load_graph(dir / "edges.csv", dir / "nodes.csv", bipartite);
    if (generated.empty()) return g;

    std::vector<NodeRecord> nodes = g.nodes();
    for (const auto& id : generated)
        if (auto i = g.index_of(id)) nodes[*i].origin = NodeOrigin::generated;
    return DyTag::build(std::move(nodes), g.edges(), g.bipartite());
}

} // namespace dytag
