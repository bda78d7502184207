#pragma once

#include <string>
#include <vector>

#include "ringside/critic/trajectory.hpp"
#include "ringside/planner/llm.hpp"
#include "ringside/planner/prompts.hpp"

namespace ringside::critic {

struct CodeError {
    std::string location;
    std::string description;
    bool operator==(const CodeError&) const = default;
};

struct ReflectionReport {
    std::string summary;
    std::vector<std::string> flaws;  // list items inside the #Reflection section, if any
    std::vector<CodeError> code_errors;
    std::vector<std::string> improvements;
    std::string raw;  // model output, verbatim
};

// Needs all three headings, a non-empty summary and at least one
// improvement. Throws ReflectionError otherwise.
ReflectionReport parse_reflection(const std::string& text);

planner::ChatRequest build_reflect_request(const std::string& code, const std::string& trajectory_json,
                                           const planner::PromptLibrary& prompts = planner::PromptLibrary::embedded());

// One re-prompt with a format reminder, then ReflectionError.
ReflectionReport reflect(const std::string& code, const CompressedTrajectory& trajectory, planner::LlmGateway& llm,
                         const planner::PromptLibrary& prompts = planner::PromptLibrary::embedded());

}  // namespace ringside::critic
