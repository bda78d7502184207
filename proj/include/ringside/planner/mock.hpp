#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ringside/planner/llm.hpp"

namespace ringside::planner {

// Drops timestamp / policy-id tokens and repeated lines (compared after
// whitespace normalization). Lines that end up empty are removed, except
// single blank separators.
std::string mock_summarize(const std::string& memory);

// Emits heuristic policies of increasing strength: rung i has aggression
// start + i * step (capped at 1). The first init prompt gets rung 0; later init
// prompts get the weak baseline so that the candidate has to improve through
// iteration; every iter prompt gets the next unused rung.
struct LadderSettings {
    double start = 0.25;
    double step = 0.05;
    double weak_init = 0.1;
};

std::string heuristic_reply(double aggression, const std::string& rationale);

// Offline LLM. Reply order for each request:
//   1. exact prompt hash from `by_hash`
//   2. next reply queued for the prompt kind (the last one repeats when
//      `repeat_last` is set)
//   3. ladder policies for init / iter prompts, when configured
//   4. built-in behaviours: compact -> mock_summarize, reflect -> a canned
//      report built from the log, debug -> the code unchanged
class MockLlm final : public LlmGateway {
public:
    MockLlm() = default;
    // JSON script: {"by_hash": {hash: reply}, "by_kind": {kind: [replies]},
    // "repeat_last": bool, "ladder": {"start", "step", "weak_init"}}.
    // The name "ladder" selects the default ladder with no scripted replies.
    static std::shared_ptr<MockLlm> from_script(const std::string& script_ref);

    std::string chat(const ChatRequest& request) override;

    void add_reply(const std::string& hash, std::string reply);
    void queue(PromptKind kind, std::string reply);
    void set_repeat_last(bool on) { repeat_last_ = on; }
    void set_ladder(LadderSettings ladder) { ladder_ = ladder; }
    int rungs_issued() const;

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::string> by_hash_;
    std::map<PromptKind, std::deque<std::string>> by_kind_;
    bool repeat_last_ = false;
    std::optional<LadderSettings> ladder_;
    int next_rung_ = 0;
    bool first_init_done_ = false;
};

}  // namespace ringside::planner
