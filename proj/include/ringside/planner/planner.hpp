#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ringside/planner/llm.hpp"
#include "ringside/planner/prompts.hpp"
#include "ringside/runtime/validate.hpp"

namespace ringside::planner {

struct SeedPolicy {
    std::string id;
    std::string code;
    std::string explanation;
};

struct PromptBundle {
    std::string env_info;
    std::vector<SeedPolicy> seeds;  // at most three are used
    std::string memory_digest;
    std::optional<std::string> reflection;      // report text
    std::optional<std::string> raw_trajectory;  // used instead of a reflection
    std::optional<std::string> old_code;
};

struct PlannerOptions {
    const PromptLibrary* prompts = &PromptLibrary::embedded();
    std::string policy_format = "python";  // or "heuristic"
    int debug_rounds = 3;
};

struct GeneratedPolicy {
    std::string source;
    std::string rationale;
};

// First fenced block becomes the source (the whole reply if there is none);
// text after "#Rationale:" (or else outside the block) is the rationale.
GeneratedPolicy parse_generation(const std::string& reply);

ChatRequest build_init_request(const PromptBundle& bundle, const PlannerOptions& options);
ChatRequest build_iter_request(const PromptBundle& bundle, const PlannerOptions& options);
ChatRequest build_debug_request(const std::string& source, const std::string& traceback,
                                const PlannerOptions& options);

GeneratedPolicy generate_initial_policy(const PromptBundle& bundle, LlmGateway& llm, const PlannerOptions& options);

// Re-prompts once when the reply repeats old_code byte for byte, then throws
// StagnationError.
GeneratedPolicy generate_iter_policy(const PromptBundle& bundle, LlmGateway& llm, const PlannerOptions& options);

using Validator = std::function<runtime::ValidationReport(const std::string& source)>;

// validate -> (fix via LLM) repeated; at most max_rounds LLM calls, then
// DebugExhausted carrying the last traceback.
std::string debug_policy(const std::string& source, LlmGateway& llm, const Validator& validator, int max_rounds,
                         const PlannerOptions& options);

// Upper bound on LLM calls for one candidate with `max_local_iters`
// improvement rounds and `debug_rounds` debug calls per generation:
// (1 + D) for the initial generation, then per round 2 for reflection
// (one format retry), 1 for memory compaction and 2 + D for the iter
// generation (one stagnation retry).
int candidate_call_budget(int max_local_iters, int debug_rounds);

}  // namespace ringside::planner
