#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "ringside/orchestrator/config.hpp"
#include "ringside/planner/llm.hpp"
#include "ringside/rating/stats.hpp"

namespace ringside::orchestrator {

struct GenerationReport {
    std::string id;
    int round = 0;  // 0 = initial generation
    rating::MatchStats stats;
    std::vector<std::string> opponents;
    std::string feedback;  // reflection, raw, fallback or none
};

struct CandidateReport {
    int iteration = 0;  // promotion slot being filled
    int attempt = 0;
    std::vector<GenerationReport> generations;
    std::string outcome;  // promoted, discarded, gateway_error, debug_exhausted, stagnation
    std::string error;
    std::optional<std::string> promoted_id;
    int llm_calls = 0;
    int llm_call_budget = 0;
    std::map<std::string, double> elo_snapshot;  // after the refresh tournament, when promoted
};

struct RunReport {
    std::string run_id;
    std::filesystem::path run_dir;
    int promotions_at_start = 0;
    int promotions = 0;  // promoted policies in the pool at the end
    bool early_stopped = false;
    std::vector<CandidateReport> candidates;
    std::map<std::string, int> llm_calls_by_kind;
};

nlohmann::json report_json(const RunReport& report);

// The improvement loop. Fills the pool up to `iteration_budget` promoted
// policies; a rerun on an interrupted pool continues from what is already
// promoted. `llm` overrides the gateway named in the config.
RunReport evolve(const RunConfig& config, std::shared_ptr<planner::LlmGateway> llm = nullptr);

}  // namespace ringside::orchestrator
