#pragma once

#include <array>
#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace ringside::planner {

enum class PromptKind { init, iter, debug, reflect, compact };
inline constexpr std::array<PromptKind, 5> kAllPromptKinds{PromptKind::init, PromptKind::iter, PromptKind::debug,
                                                           PromptKind::reflect, PromptKind::compact};

std::string_view to_string(PromptKind k);
PromptKind prompt_kind_from_string(std::string_view s);

// `kind` is metadata for logging and mocks; the http backend only sends the
// two messages.
struct ChatRequest {
    PromptKind kind = PromptKind::init;
    std::string system;
    std::string user;
};

// Stable 64-bit FNV-1a over system, a separator, and user; 16 hex digits.
std::string prompt_hash(const ChatRequest& request);

class LlmGateway {
public:
    virtual ~LlmGateway() = default;
    // Throws GatewayError on transport failure.
    virtual std::string chat(const ChatRequest& request) = 0;
};

enum class LlmBackend { http, mock };

struct LlmConfig {
    LlmBackend backend = LlmBackend::mock;
    std::string base_url;  // e.g. https://host/v1; the client posts to <base_url>/chat/completions
    std::string model;
    std::string api_key_env;  // empty: no Authorization header
    std::chrono::milliseconds request_timeout{60000};
    int max_retries = 3;
    std::chrono::milliseconds backoff_initial{500};  // doubled after each retry
    std::string script;  // mock: path to a script file, or "ladder"

    // Throws ConfigError.
    void validate() const;
};

// OpenAI-compatible chat completion client.
class HttpLlm final : public LlmGateway {
public:
    // Resolves the API key now; a missing variable is a ConfigError.
    explicit HttpLlm(LlmConfig config);
    std::string chat(const ChatRequest& request) override;

private:
    LlmConfig config_;
    std::string api_key_;
    std::string scheme_host_port_;
    std::string path_;
};

// Counts calls per kind and, with a log path, appends one JSON line per call.
class InstrumentedLlm final : public LlmGateway {
public:
    InstrumentedLlm(std::shared_ptr<LlmGateway> inner, std::filesystem::path log_path = {});
    std::string chat(const ChatRequest& request) override;

    int calls() const;
    int calls(PromptKind kind) const;
    void set_log_path(std::filesystem::path log_path);

private:
    std::shared_ptr<LlmGateway> inner_;
    std::filesystem::path log_path_;
    mutable std::mutex mutex_;
    std::array<int, kAllPromptKinds.size()> counts_{};
    long sequence_ = 0;
};

// http or mock according to the config.
std::shared_ptr<LlmGateway> make_gateway(const LlmConfig& config);

}  // namespace ringside::planner
