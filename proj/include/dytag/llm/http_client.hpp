#pragma once

#include <atomic>
#include <chrono>
#include <semaphore>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
// <resolv.h> defines _res as a macro, which breaks Eigen headers included later.
#ifdef _res
#undef _res
#endif
#include <spdlog/spdlog.h>

#include "dytag/llm/chat.hpp"

namespace dytag::llm {

/// Splits "http://host:port/v1" into ("http://host:port", "/v1").
inline std::pair<std::string, std::string> split_base_url(const std::string& url)
{
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw InvalidArgument("base_url needs a scheme: " + url);
    const auto slash = url.find('/', scheme + 3);
    std::string host = url.substr(0, slash);
    std::string path = slash == std::string::npos ? "" : url.substr(slash);
    while (!path.empty() && path.back() == '/') path.pop_back();
    return {host, path};
}

/// OpenAI-compatible chat-completions client. Retries network errors, 429
/// and 5xx with exponential backoff. An endpoint that rejects the
/// repetition_penalty extension with a 400 is retried once without it, and
/// the key stays off for the life of the client.
class HttpChatClient final : public ChatEndpoint {
public:
    explicit HttpChatClient(ChatConfig cfg)
        : cfg_(std::move(cfg)), cache_(cfg_.cache_dir), slots_(cfg_.max_in_flight)
    {
        cfg_.validate();
        std::tie(host_, path_) = split_base_url(cfg_.base_url);
        path_ += "/chat/completions";
    }

    std::string name() const override { return "http:" + cfg_.model; }
    const ChatConfig& config() const noexcept { return cfg_; }

    ChatReply chat(const std::vector<ChatMessage>& messages) override
    {
        using clock = std::chrono::steady_clock;
        auto request = chat_request_body(cfg_, messages, !drop_penalty_.load());
        const auto cache_request = request;
        if (auto hit = cache_.get(cache_request)) return ChatReply{*hit, 0, 0.0, true};

        slots_.acquire();
        struct Release {
            std::counting_semaphore<>& s;
            ~Release() { s.release(); }
        } release{slots_};

        const auto start = clock::now();
        auto ms_since = [](clock::time_point t) {
            return std::chrono::duration<double, std::milli>(clock::now() - t).count();
        };
        int retries = 0;
        for (;;) {
            httplib::Client cli(host_);
            const auto timeout = std::chrono::milliseconds(cfg_.timeout_ms);
            cli.set_connection_timeout(timeout);
            cli.set_read_timeout(timeout);
            cli.set_write_timeout(timeout);
            httplib::Headers headers;
            if (!cfg_.api_key.empty()) headers.emplace("Authorization", "Bearer " + cfg_.api_key);

            const auto attempt_start = clock::now();
            auto res = cli.Post(path_, headers, request.dump(), "application/json");
            bool timed_out = false;
            std::string failure;
            if (!res) {
                const auto err = res.error();
                timed_out = err == httplib::Error::ConnectionTimeout
                            || (err == httplib::Error::Read && ms_since(attempt_start) >= 0.9 * cfg_.timeout_ms);
                failure = "transport error: " + httplib::to_string(err);
            } else if (res->status >= 200 && res->status < 300) {
                auto content = reply_content(res->body);
                cache_.put(cache_request, content);
                return ChatReply{std::move(content), retries, ms_since(start), false};
            } else if (res->status == 400 && request.contains("repetition_penalty")
                       && res->body.find("repetition_penalty") != std::string::npos) {
                spdlog::warn("endpoint rejected repetition_penalty; resending without it");
                drop_penalty_ = true;
                request.erase("repetition_penalty");
                continue;
            } else if (res->status == 429 || res->status >= 500) {
                failure = "status " + std::to_string(res->status);
            } else {
                throw ChatError("chat endpoint returned status " + std::to_string(res->status) + ": " + res->body,
                                res->status, res->body);
            }

            if (retries >= cfg_.max_retries) {
                if (timed_out) throw TimeoutError(ms_since(start));
                throw ChatError("chat request failed after " + std::to_string(retries) + " retries (" + failure + ")",
                                res ? res->status : 0, res ? res->body : std::string{});
            }
            const int delay = cfg_.backoff_ms << std::min(retries, 16);
            ++retries;
            spdlog::debug("chat attempt failed ({}); retry {} in {} ms", failure, retries, delay);
            std::this_thread::sleep_for(std::chrono::milliseconds(delay));
        }
    }

private:
    ChatConfig cfg_;
    ResponseCache cache_;
    std::counting_semaphore<> slots_;
    std::string host_, path_;
    std::atomic<bool> drop_penalty_{false};
};

} // namespace dytag::llm
