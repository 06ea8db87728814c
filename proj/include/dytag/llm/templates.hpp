#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dytag/llm/agent_json.hpp"
#include "dytag/llm/prompt.hpp"

namespace dytag::llm {

namespace text {

inline constexpr const char* sephora_reflection = R"tpl(As a customer of the Sephora online shopping platform, you can review Sephora products based on the provided information and your own situation:
{node_info}

Here are your previous review history:
{node_memory}

Now, based on your personal description and past review history, progressively refine your memory into a concise version, ensuring it reflects your personal preferences.

Respond.
)tpl";

inline constexpr const char* sephora_query = R"tpl(You are a customer of the Sephora online shopping platform, you can review Sephora products based on the provided information and your own situation:
{node_info}

Here's your past reviews history:
{node_memory}

FIRST, you should Search for candidate products using the provided tools.

Respond.
)tpl";

inline constexpr const char* sephora_action = R"tpl(You are a customer of the Sephora online shopping platform, you can review Sephora products based on the provided information and your own situation:
{node_info}

Here's your past reviews history:
{node_memory}

Here's the candidate products you can review:
{node_items}

Here's the example of how you should proceed with your review:
{interaction_example}

You should review ONE product. You can review the chosen product with detailed text and rate it.
Additionally, you should predict how many positive/negative feedbacks will be received for this review.
The predicted time of the review should be firmly related to the time in your past reviews history (relatively later than or equal to them).
Respond using the following detailed JSON format for ONE product:
{
    "review": {
        "item_id": (str, "The ID of the product you want to review. Be sure to be one of the Item IDs mentioned above!"),
        "timestamp": (str, "The time of review (yyyy-mm-dd)"),
        "rating": (int, "The overall rating given to the product (From 1 to 5)"),
        "review_title": (str, "The title of your review"),
        "review_text": (str, "Your detailed review text"),
        "total_neg_feedback_count": (int, "Number of negative feedback received for this review"),
        "total_pos_feedback_count": (int, "Number of positive feedback received for this review")
    }
}

Respond.
)tpl";

inline constexpr const char* sephora_author_generation = R"tpl(Now we have a Sephora dataset, which records Sephora users' reviews on several Sephora products.
Here's information of the recent active Sephora author nodes:
{recent_node_info}

You are expected to generate ONE new Sephora author node for the Sephora dataset, and ensure that the generated new node is somewhat different from the existing nodes.
Respond using the following detailed JSON format for ONE new Sephora author:
{
    "sephora_author": {
        "node_id": (str, "The ID of the generated author (Format: G + 6-digit random number)"),
        "node_type": "sephora_author",
        "skin_tone": (str, "The skin tone of the generated author (e.g. light, fair, mediumTan, tan, olive, etc.)"),
        "eye_color": (str, "The eye color of the generated author (e.g. brown, green, hazel, blue, etc.)"),
        "skin_type": (str, "The skin type of the generated author (e.g. oily, dry, combination, normal, etc.)"),
        "hair_color": (str, "The hair color of the generated author (e.g. brown, black, blonde, auburn, etc.)"),
        "total_neg_feedback_count": (int, "The number of total negative feedback received from other authors of the generated author"),
        "total_pos_feedback_count": (int, "The number of total active feedback received from other authors of the generated author")
    }
}

Respond.
)tpl";

inline constexpr const char* sephora_product_generation = R"tpl(Now we have a Sephora dataset, which records Sephora users' reviews on several Sephora products.
Here's information of the recent active Sephora product nodes:
{recent_node_info}

You are expected to generate ONE new Sephora product node for the Sephora dataset, and ensure that the generated new node is somewhat different from the existing nodes.
Respond using the following detailed JSON format for ONE new Sephora product:
{
    "sephora_product": {
        "node_id": (str, "The ID of the generated product (Format: G + 5-digit random number)"),
        "node_type": "sephora_product",
        "product_name": (str, "The name of the generated product"),
        "brand_name": (str, "The name of the brand of the generated product"),
        "primary_category": (str, "The primary category of the generated product"),
        "secondary_category": (str, "The secondary category of the generated product"),
        "ingredients": (str, "The ingredients of the generated product"),
        "loves_count": (int, "The loves count from the users of the generated product"),
        "rating": (float, "The avg rating from the users of the generated product"),
        "reviews": (int, "The number reviews from the users of the generated product"),
        "size": (str, "The size the generated product"),
        "price_usd": (float, "The price the generated product")
    }
}

Respond.
)tpl";

inline constexpr const char* weibo_reflection = R"tpl(As a Weibo user, you can search for other Weibo users who may interact with you on the online social media Weibo platform:
{node_info}

Here are your previous interactions history:
{node_memory}

Now, based on your personal description and past interactions history, progressively refine your memory into a concise version, ensuring it reflects your personal preferences.

Respond.
)tpl";

inline constexpr const char* weibo_query = R"tpl(As a Weibo user, you need to search for other Weibo users who may interact with you on the online social media Weibo platform:
{node_info}

Here are your previous interactions history:
{node_memory}

First, utilize the provided tools to search for potential Weibo users who may interact with you.

Respond.
)tpl";

inline constexpr const char* weibo_action = R"tpl(As a Weibo user, you need to search for other Weibo users who may interact with you on the online social media Weibo platform:
{node_info}

Here are the potential Weibo users you can choose from:
{node_items}

Here is your previous interaction history:
{node_memory}

Here's the example of how to interact with others:
{interaction_example}

You should select ONE destination user, you're tend to select the one you have interacted with before. Respond using the following detailed JSON format:
{
    "interact": {
        "item_id": (str, "The ID of the destination user. Be sure to be one of the Item IDs mentioned above!")
    }
}

Respond.
)tpl";

inline constexpr const char* weibo_request = R"tpl(As a Weibo user, you need to search for other Weibo users who may interact with you on the online social media Weibo platform:
{node_info}

Here is your previous interaction history:
{node_memory}

The chosen destination Weibo user who may interact with you is:
{item_info}

Here's the interaction history of this chosen Weibo user:
{item_memory}

Here's the example of how to interact with others:
{interaction_example}

You should select ONE destination user. You should post texts as the source user and the selected destination user should interact with you in detailed text.
Additionally, you should label the type of the interaction (comment or repost).
The predicted time of the interaction should be firmly related to the time in your previous interaction history (relatively later than or equal to them).
Respond using the following detailed JSON format:
{
    "interact": {
        "item_id": (str, "The ID of the destination user"),
        "timestamp": (str, "The time of the interaction (yyyy-mm-dd hh-mm-ss)"),
        "label": (str, "The type of interaction (TWO TYPE: 1.comment, 2.repost)"),
        "src_text": (str, "The text from the source user"),
        "dst_text": (str, "The text from the destination user")
    }
}

Respond.
)tpl";

inline constexpr const char* weibo_user_generation = R"tpl(Now we have a weibo dataset, which records the interaction history between Weibo users.
Here's information of the recent active user nodes:
{recent_node_info}

You are expected to generate ONE new user node for the weibo dataset, and ensure that the generated new node is somewhat different from the existing nodes.
Respond using the following detailed JSON format for ONE new user:
{
    "weibo_user": {
        "node_id": (str, "The ID of the generated user (Format: G + 5-digit random number)"),
        "node_type": "weibo_user",
        "user_name": (str, "The name of the generated user"),
        "user_source": (str, "The source(IP/location/device) of the generated user"),
        "user_gender": (str, "The gender of the generated user"),
        "user_location": (str, "The location of the generated user"),
        "user_followers": (int, "The number of the followers of the generated user"),
        "user_friends": (int, "The number of the followees of the generated user"),
        "user_description": (str, "The description of the generated user")
    }
}

Respond.
)tpl";

inline constexpr const char* generic_reflection = R"tpl(You are {agent_description} on {platform}:
{node_info}

Here is your interaction history:
{node_memory}

Based on your description and your interaction history, refine your memory into a concise summary that reflects your preferences.

Respond.
)tpl";

inline constexpr const char* generic_action = R"tpl(You are {agent_description} on {platform}:
{node_info}

Here is your interaction history:
{node_memory}

Here are the candidate {destination_plural} you can choose from:
{node_items}

Here is an example {interaction_noun}:
{interaction_example}

Choose ONE {destination_noun} and write the {interaction_noun}. Its time must be later than or equal to the times in your history.
Respond using the following detailed JSON format:
{
    "interact": {
        "item_id": (str, "The ID of the chosen {destination_noun}. Be sure to be one of the Item IDs mentioned above!"),
        "timestamp": (str, "The time of the {interaction_noun}, in the same format as your history"),
        "label": (str, "{label_description}"),
        "text": (str, "The text of the {interaction_noun}")
    }
}

Respond.
)tpl";

inline constexpr const char* generic_node_generation = R"tpl(Now we have a {platform} dataset.
Here's information of the recently active {role_plural}:
{recent_node_info}

You are expected to generate ONE new {role_noun}, and ensure that it is somewhat different from the existing ones.
Respond using the following detailed JSON format:
{
    "node": {
        "node_id": (str, "The ID of the generated {role_noun} (Format: G + 5-digit random number)"),
        "text": (str, "A description of the generated {role_noun} in the style of the examples above")
    }
}

Respond.
)tpl";

} // namespace text

/// All built-in templates by id ("<scenario>/<stage>").
inline const std::map<std::string, PromptTemplate>& template_library()
{
    static const std::map<std::string, PromptTemplate> lib = [] {
        std::map<std::string, PromptTemplate> m;
        auto add = [&](const char* id, const char* body) { m.emplace(id, PromptTemplate{id, body}); };
        add("sephora/reflection", text::sephora_reflection);
        add("sephora/query", text::sephora_query);
        add("sephora/action", text::sephora_action);
        add("sephora/source_generation", text::sephora_author_generation);
        add("sephora/destination_generation", text::sephora_product_generation);
        add("weibo/reflection", text::weibo_reflection);
        add("weibo/query", text::weibo_query);
        add("weibo/action", text::weibo_action);
        add("weibo/request", text::weibo_request);
        add("weibo/source_generation", text::weibo_user_generation);
        add("weibo/destination_generation", text::weibo_user_generation);
        add("generic/reflection", text::generic_reflection);
        add("generic/action", text::generic_action);
        add("generic/node_generation", text::generic_node_generation);
        return m;
    }();
    return lib;
}

inline const PromptTemplate& get_template(const std::string& id)
{
    const auto& lib = template_library();
    auto it = lib.find(id);
    if (it == lib.end()) throw TemplateError("unknown template: " + id);
    return it->second;
}

/// Wording bound into the generic templates.
struct DatasetDescriptor {
    std::string platform = "an online platform";
    std::string agent_description = "a user";
    std::string source_noun = "user";
    std::string source_plural = "users";
    std::string destination_noun = "item";
    std::string destination_plural = "items";
    std::string interaction_noun = "interaction";
    std::string label_description = "The label of the interaction";
};

/// How the replies of one scenario map onto graph records.
struct NodeSchema {
    std::string template_id;
    std::string wrapper;               ///< key enclosing the node fields
    std::vector<FieldSpec> fields;     ///< node_id first; the rest become the node text
};

struct Scenario {
    std::string id;
    std::string reflection_template;
    std::string action_template;
    std::optional<std::string> request_template; ///< second call that writes the edge for a chosen item
    std::string action_wrapper;                   ///< key enclosing the action fields
    std::vector<FieldSpec> action_fields;         ///< fields of the reply that carries the edge content
    std::string label_field;
    std::vector<std::string> text_fields;         ///< joined with newlines into the edge text
    NodeSchema source_node;
    NodeSchema destination_node;
    std::map<std::string, PromptTemplate> specialized; ///< generic templates with descriptors bound

    const PromptTemplate& get(const std::string& template_id) const
    {
        auto it = specialized.find(template_id);
        return it != specialized.end() ? it->second : get_template(template_id);
    }
};

inline Scenario sephora_scenario()
{
    using F = FieldType;
    Scenario s;
    s.id = "sephora";
    s.reflection_template = "sephora/reflection";
    s.action_template = "sephora/action";
    s.action_wrapper = "review";
    s.action_fields = {{"item_id", F::string},      {"timestamp", F::string},   {"rating", F::integer},
                       {"review_title", F::string}, {"review_text", F::string}, {"total_neg_feedback_count", F::any},
                       {"total_pos_feedback_count", F::any}};
    s.label_field = "rating";
    s.text_fields = {"review_title", "review_text"};
    s.source_node = {"sephora/source_generation",
                     "sephora_author",
                     {{"node_id", F::string},
                      {"skin_tone", F::string},
                      {"eye_color", F::string},
                      {"skin_type", F::string},
                      {"hair_color", F::string},
                      {"total_neg_feedback_count", F::any},
                      {"total_pos_feedback_count", F::any}}};
    s.destination_node = {"sephora/destination_generation",
                          "sephora_product",
                          {{"node_id", F::string},
                           {"product_name", F::string},
                           {"brand_name", F::string},
                           {"primary_category", F::string},
                           {"secondary_category", F::string},
                           {"ingredients", F::string},
                           {"loves_count", F::any},
                           {"rating", F::any},
                           {"reviews", F::any},
                           {"size", F::string},
                           {"price_usd", F::any}}};
    return s;
}

inline Scenario weibo_scenario()
{
    using F = FieldType;
    Scenario s;
    s.id = "weibo";
    s.reflection_template = "weibo/reflection";
    s.action_template = "weibo/action";
    s.request_template = "weibo/request";
    s.action_wrapper = "interact";
    s.action_fields = {{"item_id", F::string}, {"timestamp", F::string}, {"label", F::string},
                       {"src_text", F::string}, {"dst_text", F::string}};
    s.label_field = "label";
    s.text_fields = {"src_text", "dst_text"};
    s.source_node = {"weibo/source_generation",
                     "weibo_user",
                     {{"node_id", F::string},
                      {"user_name", F::string},
                      {"user_source", F::string},
                      {"user_gender", F::string},
                      {"user_location", F::string},
                      {"user_followers", F::any},
                      {"user_friends", F::any},
                      {"user_description", F::string}}};
    s.destination_node = s.source_node;
    s.destination_node.template_id = "weibo/destination_generation";
    return s;
}

inline Scenario generic_scenario(const DatasetDescriptor& d)
{
    using F = FieldType;
    Scenario s;
    s.id = "generic";
    s.reflection_template = "generic/reflection";
    s.action_template = "generic/action";
    s.action_wrapper = "interact";
    s.action_fields = {{"item_id", F::string}, {"timestamp", F::string}, {"label", F::string}, {"text", F::string}};
    s.label_field = "label";
    s.text_fields = {"text"};
    s.source_node = {"generic/source_generation", "node", {{"node_id", F::string}, {"text", F::string}}};
    s.destination_node = {"generic/destination_generation", "node", {{"node_id", F::string}, {"text", F::string}}};

    const SlotMap common{{"platform", d.platform},
                         {"agent_description", d.agent_description},
                         {"destination_noun", d.destination_noun},
                         {"destination_plural", d.destination_plural},
                         {"interaction_noun", d.interaction_noun},
                         {"label_description", d.label_description}};
    s.specialized["generic/reflection"] = specialize(get_template("generic/reflection"), common);
    s.specialized["generic/action"] = specialize(get_template("generic/action"), common);
    const auto& gen = get_template("generic/node_generation");
    s.specialized["generic/source_generation"] =
        specialize(gen, {{"platform", d.platform}, {"role_noun", d.source_noun}, {"role_plural", d.source_plural}},
                   "generic/source_generation");
    s.specialized["generic/destination_generation"] = specialize(
        gen, {{"platform", d.platform}, {"role_noun", d.destination_noun}, {"role_plural", d.destination_plural}},
        "generic/destination_generation");
    return s;
}

inline Scenario scenario_by_name(const std::string& name, const DatasetDescriptor& d = {})
{
    if (name == "sephora") return sephora_scenario();
    if (name == "weibo") return weibo_scenario();
    if (name == "generic") return generic_scenario(d);
    throw InvalidArgument("unknown scenario: " + name + " (expected sephora, weibo or generic)");
}

} // namespace dytag::llm
