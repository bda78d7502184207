#pragma once

#include <chrono>
#include <string>

#include "ringside/arena/config.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::runtime {

struct ValidationReport {
    bool passed = false;
    std::string reason;     // empty when passed
    std::string traceback;  // captured traceback / stderr, empty when passed
    std::chrono::milliseconds wall_time{0};
};

// Starts the policy, feeds it one synthetic observation from a fresh arena
// and checks for a well-formed action. Never throws for policy problems.
ValidationReport validate_policy(const PolicySpec& spec, const arena::EnvConfig& config);

}  // namespace ringside::runtime
