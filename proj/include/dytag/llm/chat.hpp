#pragma once

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dytag/util/error.hpp"
#include "dytag/util/hash.hpp"

namespace dytag::llm {

struct ChatMessage {
    std::string role; ///< "system", "user" or "assistant"
    std::string content;

    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct ChatConfig {
    std::string base_url = "http://127.0.0.1:8000/v1";
    std::string api_key;
    std::string model = "gpt-4o-mini";
    double temperature = 0.8;
    double top_p = 0.9;
    double repetition_penalty = 1.1;
    int max_tokens = 2000;
    int timeout_ms = 60000;
    int max_retries = 3;
    int backoff_ms = 500;       ///< first retry delay; doubles per attempt
    int max_in_flight = 8;
    std::filesystem::path cache_dir; ///< empty disables the response cache

    void validate() const
    {
        if (!(temperature >= 0)) throw InvalidArgument("chat config: temperature must be >= 0");
        if (!(top_p > 0 && top_p <= 1)) throw InvalidArgument("chat config: top_p must be in (0, 1]");
        if (max_tokens < 1) throw InvalidArgument("chat config: max_tokens must be >= 1");
        if (timeout_ms < 1) throw InvalidArgument("chat config: timeout_ms must be >= 1");
        if (max_retries < 0) throw InvalidArgument("chat config: max_retries must be >= 0");
        if (max_in_flight < 1) throw InvalidArgument("chat config: max_in_flight must be >= 1");
    }

    /// DYTAG_LLM_BASE_URL, DYTAG_LLM_MODEL and DYTAG_LLM_API_KEY (falling back
    /// to OPENAI_API_KEY) override the corresponding fields when set.
    ChatConfig& apply_env()
    {
        if (const char* v = std::getenv("DYTAG_LLM_BASE_URL"); v && *v) base_url = v;
        if (const char* v = std::getenv("DYTAG_LLM_MODEL"); v && *v) model = v;
        if (const char* v = std::getenv("DYTAG_LLM_API_KEY"); v && *v)
            api_key = v;
        else if (const char* o = std::getenv("OPENAI_API_KEY"); o && *o && api_key.empty())
            api_key = o;
        return *this;
    }
};

struct ChatReply {
    std::string content;
    int retries = 0;        ///< transient failures before success
    double elapsed_ms = 0;
    bool from_cache = false;
};

/// Non-2xx response, malformed body, or transport failure after retries.
class ChatError : public Error {
public:
    ChatError(const std::string& what, int status = 0, std::string body = {})
        : Error(what), status_(status), body_(std::move(body))
    {
    }
    int status() const noexcept { return status_; }
    const std::string& body() const noexcept { return body_; }

private:
    int status_;
    std::string body_;
};

class TimeoutError : public ChatError {
public:
    explicit TimeoutError(double elapsed_ms)
        : ChatError("chat request timed out after " + std::to_string(static_cast<long long>(elapsed_ms)) + " ms"),
          elapsed_ms_(elapsed_ms)
    {
    }
    double elapsed_ms() const noexcept { return elapsed_ms_; }

private:
    double elapsed_ms_;
};

/// Anything that answers a chat transcript. Implementations must be safe to
/// call from several threads at once.
class ChatEndpoint {
public:
    virtual ~ChatEndpoint() = default;
    virtual std::string name() const = 0;
    virtual ChatReply chat(const std::vector<ChatMessage>& messages) = 0;
};

/// OpenAI-compatible chat-completions request body.
inline nlohmann::json chat_request_body(const ChatConfig& cfg, const std::vector<ChatMessage>& messages,
                                        bool with_repetition_penalty = true)
{
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    nlohmann::json body{{"model", cfg.model},       {"messages", msgs},   {"temperature", cfg.temperature},
                        {"top_p", cfg.top_p},       {"max_tokens", cfg.max_tokens}, {"stream", false}};
    if (with_repetition_penalty) body["repetition_penalty"] = cfg.repetition_penalty;
    return body;
}

/// First choice's message content. Throws ChatError on any other shape.
inline std::string reply_content(const std::string& body)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception&) {
        throw ChatError("chat response is not JSON", 200, body);
    }
    if (!j.contains("choices") || !j["choices"].is_array() || j["choices"].empty())
        throw ChatError("chat response has no choices", 200, body);
    const auto& c = j["choices"][0];
    if (c.contains("message") && c["message"].contains("content") && c["message"]["content"].is_string())
        return c["message"]["content"].get<std::string>();
    if (c.contains("text") && c["text"].is_string()) return c["text"].get<std::string>();
    throw ChatError("chat response choice has no content", 200, body);
}

/// On-disk reply store keyed by a hash of the request body. A hit requires
/// the stored request to match exactly.
class ResponseCache {
public:
    explicit ResponseCache(std::filesystem::path dir) : dir_(std::move(dir))
    {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const noexcept { return !dir_.empty(); }

    static std::string key(const nlohmann::json& request)
    {
        std::ostringstream os;
        os << std::hex << fnv1a64(request.dump());
        return os.str();
    }

    std::optional<std::string> get(const nlohmann::json& request) const
    {
        if (!enabled()) return std::nullopt;
        std::ifstream in(dir_ / (key(request) + ".json"));
        if (!in) return std::nullopt;
        try {
            const auto j = nlohmann::json::parse(in);
            if (j.at("request") != request) return std::nullopt;
            return j.at("content").get<std::string>();
        } catch (const nlohmann::json::exception&) {
            return std::nullopt;
        }
    }

    void put(const nlohmann::json& request, const std::string& content) const
    {
        if (!enabled()) return;
        const auto path = dir_ / (key(request) + ".json");
        const auto tmp = path.string() + ".tmp";
        {
            std::ofstream out(tmp);
            out << nlohmann::json{{"request", request}, {"content", content}}.dump(2) << '\n';
        }
        std::filesystem::rename(tmp, path);
    }

private:
    std::filesystem::path dir_;
};

/// Replies produced by a function of (messages, call index). The index counts
/// calls across all threads.
class ScriptedChatEndpoint final : public ChatEndpoint {
public:
    using Script = std::function<std::string(const std::vector<ChatMessage>&, std::size_t call)>;

    explicit ScriptedChatEndpoint(Script script, std::string name = "scripted")
        : script_(std::move(script)), name_(std::move(name))
    {
    }

    std::string name() const override { return name_; }

    ChatReply chat(const std::vector<ChatMessage>& messages) override
    {
        std::size_t call;
        {
            std::lock_guard lock(mu_);
            call = calls_++;
        }
        return ChatReply{script_(messages, call), 0, 0.0, false};
    }

    std::size_t calls() const
    {
        std::lock_guard lock(mu_);
        return calls_;
    }

private:
    Script script_;
    std::string name_;
    mutable std::mutex mu_;
    std::size_t calls_ = 0;
};

} // namespace dytag::llm
