#include "ringside/planner/llm.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "ringside/common/errors.hpp"
#include "ringside/planner/mock.hpp"

namespace ringside::planner {

using nlohmann::json;

std::string_view to_string(PromptKind k) {
    switch (k) {
        case PromptKind::init: return "init";
        case PromptKind::iter: return "iter";
        case PromptKind::debug: return "debug";
        case PromptKind::reflect: return "reflect";
        case PromptKind::compact: return "compact";
    }
    return "init";
}

PromptKind prompt_kind_from_string(std::string_view s) {
    for (PromptKind k : kAllPromptKinds) {
        if (to_string(k) == s) return k;
    }
    throw ContractViolation("unknown prompt kind '" + std::string(s) + "'");
}

std::string prompt_hash(const ChatRequest& request) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
    };
    feed(request.system);
    feed(std::string_view("\x1f", 1));
    feed(request.user);
    return fmt::format("{:016x}", h);
}

void LlmConfig::validate() const {
    if (backend == LlmBackend::http) {
        if (base_url.empty()) throw ConfigError("llm.base_url is required for the http backend");
        if (model.empty()) throw ConfigError("llm.model is required for the http backend");
        if (request_timeout.count() <= 0) throw ConfigError("llm.request_timeout must be > 0");
    } else if (script.empty()) {
        throw ConfigError("llm.script is required for the mock backend");
    }
    if (max_retries < 0) throw ConfigError("llm.max_retries must be >= 0");
}

HttpLlm::HttpLlm(LlmConfig config) : config_(std::move(config)) {
    config_.validate();
    static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
    std::smatch m;
    if (!std::regex_match(config_.base_url, m, url_re)) {
        throw ConfigError("llm.base_url is not an http(s) URL: " + config_.base_url);
    }
    scheme_host_port_ = m[1].str();
    path_ = m[2].str();
    while (!path_.empty() && path_.back() == '/') path_.pop_back();
    path_ += "/chat/completions";
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (scheme_host_port_.rfind("https://", 0) == 0) {
        throw ConfigError("https endpoints need a build with OpenSSL");
    }
#endif
    if (!config_.api_key_env.empty()) {
        const char* key = std::getenv(config_.api_key_env.c_str());
        if (key == nullptr || *key == '\0') {
            throw ConfigError("environment variable " + config_.api_key_env + " (llm.api_key_env) is not set");
        }
        api_key_ = key;
    }
}

std::string HttpLlm::chat(const ChatRequest& request) {
    json body{{"model", config_.model},
              {"messages", json::array({json{{"role", "system"}, {"content", request.system}},
                                        json{{"role", "user"}, {"content", request.user}}})}};
    const std::string payload = body.dump();

    httplib::Client client(scheme_host_port_);
    const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
    const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(config_.request_timeout - secs);
    client.set_connection_timeout(secs.count(), usecs.count());
    client.set_read_timeout(secs.count(), usecs.count());
    client.set_write_timeout(secs.count(), usecs.count());
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    auto backoff = config_.backoff_initial;
    std::string last_error;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) {
            spdlog::warn("llm request failed ({}), retry {}/{} in {} ms", last_error, attempt, config_.max_retries,
                         backoff.count());
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        auto res = client.Post(path_, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        const int status = res->status;
        if (status == 401 || status == 403) {
            throw GatewayError(fmt::format("llm endpoint rejected the credentials (HTTP {})", status));
        }
        if (status == 408 || status == 429 || status >= 500) {
            last_error = fmt::format("HTTP {}", status);
            continue;
        }
        if (status != 200) throw GatewayError(fmt::format("llm endpoint returned HTTP {}: {}", status, res->body));
        try {
            const json reply = json::parse(res->body);
            return reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw GatewayError(std::string("malformed completion response: ") + e.what());
        }
    }
    throw GatewayError(fmt::format("llm request failed after {} retries: {}", config_.max_retries, last_error));
}

InstrumentedLlm::InstrumentedLlm(std::shared_ptr<LlmGateway> inner, std::filesystem::path log_path)
    : inner_(std::move(inner)), log_path_(std::move(log_path)) {}

void InstrumentedLlm::set_log_path(std::filesystem::path log_path) {
    std::lock_guard lock(mutex_);
    log_path_ = std::move(log_path);
}

std::string InstrumentedLlm::chat(const ChatRequest& request) {
    long seq;
    {
        std::lock_guard lock(mutex_);
        ++counts_[static_cast<std::size_t>(request.kind)];
        seq = ++sequence_;
    }
    const auto t0 = std::chrono::steady_clock::now();
    json entry{{"seq", seq},
               {"kind", std::string(to_string(request.kind))},
               {"hash", prompt_hash(request)},
               {"system", request.system},
               {"user", request.user}};
    auto write_log = [&] {
        std::lock_guard lock(mutex_);
        if (log_path_.empty()) return;
        entry["elapsed_ms"] = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
        std::ofstream out(log_path_, std::ios::app);
        out << entry.dump() << '\n';
    };
    try {
        std::string reply = inner_->chat(request);
        entry["response"] = reply;
        write_log();
        return reply;
    } catch (const std::exception& e) {
        entry["error"] = e.what();
        write_log();
        throw;
    }
}

int InstrumentedLlm::calls() const {
    std::lock_guard lock(mutex_);
    int total = 0;
    for (int c : counts_) total += c;
    return total;
}

int InstrumentedLlm::calls(PromptKind kind) const {
    std::lock_guard lock(mutex_);
    return counts_[static_cast<std::size_t>(kind)];
}

std::shared_ptr<LlmGateway> make_gateway(const LlmConfig& config) {
    config.validate();
    if (config.backend == LlmBackend::http) return std::make_shared<HttpLlm>(config);
    return MockLlm::from_script(config.script);
}

}  // namespace ringside::planner
