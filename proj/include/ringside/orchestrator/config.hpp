#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "ringside/arena/config.hpp"
#include "ringside/planner/llm.hpp"
#include "ringside/rating/tournament.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::orchestrator {

struct Ablations {
    bool aux_info = true;
    bool two_step_reflection = true;
    bool reflection_memory = true;
};

struct RunConfig {
    RunConfig() { llm.script = "ladder"; }

    std::filesystem::path pool = "pool";
    int iteration_budget = 20;  // promoted policies the pool should hold
    double promotion_threshold = 0.6;
    int max_local_iters = 8;
    int k_opponents = 3;
    int L = 10;
    double temperature = 100.0;
    int debug_rounds = 3;
    int memory_budget = 4000;
    int early_stop = 3;  // consecutive failed candidates; 0 disables
    std::string policy_format = "python";
    std::string prompts_dir;  // overrides for the embedded templates
    std::uint64_t seed = 0;
    std::optional<std::string> id_start;  // fixed YYYYMMDD_HHMMSS for reproducible ids
    rating::TournamentConfig tournament;
    planner::LlmConfig llm;
    arena::EnvConfig env;
    Ablations ablations;
    runtime::RuntimeSettings runtime;

    // Throws ConfigError.
    void validate() const;
};

// TOML subset: top-level keys plus [tournament], [llm], [env], [ablations]
// and [runtime] sections. Unknown keys and bad values are ConfigErrors.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& file);

}  // namespace ringside::orchestrator
