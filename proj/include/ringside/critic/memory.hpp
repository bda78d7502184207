#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "ringside/critic/reflect.hpp"
#include "ringside/planner/llm.hpp"
#include "ringside/planner/prompts.hpp"

namespace ringside::critic {

inline constexpr std::size_t kDefaultMemoryBudget = 4000;

struct ReflectionMemory {
    std::vector<std::pair<std::string, std::string>> entries;  // (iteration id, report digest)
    std::size_t char_budget = kDefaultMemoryBudget;
    std::string digest;  // markdown

    // Digest only; entries are not persisted.
    void save(const std::filesystem::path& file) const;
    static ReflectionMemory load(const std::filesystem::path& file, std::size_t char_budget = kDefaultMemoryBudget);
};

// Markdown block for one report, headed by the iteration id.
std::string report_digest(const ReflectionReport& report, const std::string& iteration_id);

// Removes policy-id and ISO timestamp tokens.
std::string strip_timestamps(const std::string& text);
bool contains_timestamp(const std::string& text);

planner::ChatRequest build_compact_request(const std::string& digest,
                                           const planner::PromptLibrary& prompts = planner::PromptLibrary::embedded());

// Appends the report digest; over budget, asks the LLM to condense the whole
// digest. A longer answer is rejected (warning) and the appended digest kept.
// If the digest is still over budget afterwards, the oldest lines are dropped.
ReflectionMemory append_and_compact(ReflectionMemory memory, const ReflectionReport& report,
                                    const std::string& iteration_id, planner::LlmGateway& llm,
                                    const planner::PromptLibrary& prompts = planner::PromptLibrary::embedded());

// One compaction step on its own. Returns the new digest; never longer than
// the input.
std::string compact_digest(const std::string& digest, planner::LlmGateway& llm,
                           const planner::PromptLibrary& prompts = planner::PromptLibrary::embedded());

}  // namespace ringside::critic
