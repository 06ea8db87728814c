#pragma once

#include <algorithm>
#include <atomic>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "dytag/gen/policy.hpp"
#include "dytag/llm/agent_json.hpp"
#include "dytag/llm/chat.hpp"
#include "dytag/llm/templates.hpp"

namespace dytag {

/// Agent policy that prompts a chat endpoint with the scenario templates.
/// A reply that does not parse, or names an item outside the recall list, is
/// re-asked up to `attempts` times; after that the stub fallback answers.
/// Endpoint failures (after the client's own retries) propagate.
class LlmPolicy final : public AgentPolicy {
public:
    LlmPolicy(llm::ChatEndpoint& endpoint, llm::Scenario scenario, std::size_t attempts = 3)
        : endpoint_(endpoint), scenario_(std::move(scenario)), attempts_(std::max<std::size_t>(1, attempts))
    {
    }

    std::string name() const override { return "llm:" + endpoint_.name() + ":" + scenario_.id; }

    AgentAction select_destination(const SelectionContext& ctx) override
    {
        for (std::size_t a = 0; a < attempts_; ++a) {
            try {
                return try_select(ctx);
            } catch (const llm::ReplyParseError& e) {
                ++parse_failures_;
                spdlog::debug("agent {} attempt {}: {}", ctx.source.node_id, a + 1, e.what());
            }
        }
        ++fallbacks_;
        spdlog::warn("agent {}: no usable reply after {} attempts; using stub policy", ctx.source.node_id, attempts_);
        return fallback_.select_destination(ctx);
    }

    NodeRecord generate_node(const NodeContext& ctx) override
    {
        const auto& schema = ctx.source_side ? scenario_.source_node : scenario_.destination_node;
        std::string recent;
        for (const auto* n : ctx.recent) recent += "ID: " + n->node_id + ", " + excerpt(n->text, 300) + "\n";
        const auto prompt =
            llm::render_template(scenario_.get(schema.template_id), {{"recent_node_info", recent.empty() ? "(none)" : recent}});
        for (std::size_t a = 0; a < attempts_; ++a) {
            const auto reply = ask(prompt);
            try {
                std::vector<llm::FieldSpec> fields(schema.fields.begin() + 1, schema.fields.end());
                const auto parsed = llm::parse_agent_json(reply, fields);
                std::string text;
                if (fields.size() == 1) {
                    text = json_text(parsed.fields[fields[0].name]);
                } else {
                    for (const auto& f : fields) {
                        if (!text.empty()) text += ", ";
                        text += f.name + ": " + json_text(parsed.fields[f.name]);
                    }
                }
                std::string id;
                const auto& scope = parsed.wrapper.empty() ? parsed.object : parsed.object[parsed.wrapper];
                if (scope.contains("node_id") && scope["node_id"].is_string()) id = scope["node_id"].get<std::string>();
                return {id, ctx.role, text, NodeOrigin::generated};
            } catch (const llm::ReplyParseError& e) {
                ++parse_failures_;
                spdlog::debug("node generation attempt {}: {}", a + 1, e.what());
            }
        }
        ++fallbacks_;
        spdlog::warn("node generation: no usable reply after {} attempts; using stub policy", attempts_);
        return fallback_.generate_node(ctx);
    }

    std::string reflect(const NodeMemory& m) override
    {
        const auto prompt = llm::render_template(scenario_.get(scenario_.reflection_template),
                                                 {{"node_info", m.node_id}, {"node_memory", m.serialize()}});
        return std::string(trim(ask(prompt)));
    }

    nlohmann::json stats() const override
    {
        return {{"llm_calls", calls_.load()},
                {"parse_failures", parse_failures_.load()},
                {"fallbacks", fallbacks_.load()}};
    }

private:
    static std::string json_text(const nlohmann::json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

    std::string ask(const std::string& prompt)
    {
        ++calls_;
        return endpoint_.chat({{"user", prompt}}).content;
    }

    static std::string node_info(const NodeRecord& n) { return "ID: " + n.node_id + "\n" + n.text; }

    std::string items(const SelectionContext& ctx) const
    {
        std::string s;
        for (const auto& id : ctx.candidates) {
            s += "Item ID: " + id;
            if (ctx.graph.contains(id) && !ctx.graph.node(id).text.empty()) s += ", " + excerpt(ctx.graph.node(id).text, 300);
            s += "\n";
        }
        return s;
    }

    /// The newest remembered interaction (or the graph's latest edge) written
    /// in the scenario's reply format.
    std::string example(const SelectionContext& ctx) const
    {
        std::string item, label, text;
        Timestamp ts;
        if (const auto newest = ctx.memory.newest_first(); !newest.empty()) {
            item = newest.front()->counterpart;
            label = newest.front()->label;
            text = newest.front()->text;
            ts = newest.front()->timestamp;
        } else if (ctx.graph.num_edges() > 0) {
            const auto& e = ctx.graph.edges().back();
            item = e.dst;
            label = e.label;
            text = e.text;
            ts = e.timestamp;
        } else {
            return "(none)";
        }
        nlohmann::json inner = nlohmann::json::object();
        bool text_used = false;
        for (const auto& f : scenario_.action_fields) {
            if (f.name == "item_id")
                inner[f.name] = item;
            else if (f.name == "timestamp")
                inner[f.name] = ts.to_string();
            else if (f.name == scenario_.label_field)
                inner[f.name] = label;
            else if (!text_used && std::find(scenario_.text_fields.begin(), scenario_.text_fields.end(), f.name)
                                       != scenario_.text_fields.end()) {
                inner[f.name] = text;
                text_used = true;
            } else
                inner[f.name] = f.type == llm::FieldType::string ? nlohmann::json("") : nlohmann::json(0);
        }
        return nlohmann::json{{scenario_.action_wrapper, inner}}.dump(2);
    }

    std::size_t rank_of(const SelectionContext& ctx, const std::string& id) const
    {
        const auto it = std::find(ctx.candidates.begin(), ctx.candidates.end(), std::string(trim(id)));
        if (it == ctx.candidates.end()) throw llm::ReplyParseError("item_id \"" + id + "\" is not in the recall list");
        return static_cast<std::size_t>(it - ctx.candidates.begin());
    }

    std::string item_history(const DyTag& g, const std::string& id) const
    {
        std::string s;
        int shown = 0;
        for (auto it = g.edges().rbegin(); it != g.edges().rend() && shown < 5; ++it) {
            if (it->src != id && it->dst != id) continue;
            s += "time " + it->timestamp.to_string() + ": " + it->src + " -> " + it->dst + " [" + it->label + "] "
                 + excerpt(it->text, 200) + "\n";
            ++shown;
        }
        return s.empty() ? "(no history)" : s;
    }

    AgentAction try_select(const SelectionContext& ctx)
    {
        const llm::SlotMap slots{{"node_info", node_info(ctx.source)},
                                 {"node_memory", ctx.memory.prompt_text()},
                                 {"node_items", items(ctx)},
                                 {"interaction_example", example(ctx)}};
        const auto& action_tpl = scenario_.get(scenario_.action_template);
        std::string reply = ask(llm::render_template(action_tpl, slots));

        AgentAction action;
        if (scenario_.request_template) {
            const auto choice = llm::parse_agent_json(reply, {{"item_id", llm::FieldType::string}});
            const auto chosen = std::string(trim(choice.fields["item_id"].get<std::string>()));
            action.confidence_rank = rank_of(ctx, chosen);
            auto request_slots = slots;
            request_slots.erase("node_items");
            request_slots["item_info"] = ctx.graph.contains(chosen) ? node_info(ctx.graph.node(chosen)) : chosen;
            request_slots["item_memory"] = item_history(ctx.graph, chosen);
            reply = ask(llm::render_template(scenario_.get(*scenario_.request_template), request_slots));
        }
        const auto parsed = llm::parse_agent_json(reply, scenario_.action_fields);
        const auto& f = parsed.fields;
        action.confidence_rank = rank_of(ctx, f["item_id"].get<std::string>());
        action.chosen_dst = ctx.candidates[action.confidence_rank];
        action.label = json_text(f[scenario_.label_field]);
        for (const auto& name : scenario_.text_fields) {
            const auto t = json_text(f[name]);
            if (t.empty()) continue;
            if (!action.edge_text.empty()) action.edge_text += "\n";
            action.edge_text += t;
        }
        action.timestamp = Timestamp::parse(trim(json_text(f["timestamp"])));
        return action;
    }

    llm::ChatEndpoint& endpoint_;
    llm::Scenario scenario_;
    std::size_t attempts_;
    RecencyPolicy fallback_;
    std::atomic<std::size_t> calls_{0}, parse_failures_{0}, fallbacks_{0};
};

} // namespace dytag
