#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ringside/arena/config.hpp"
#include "ringside/arena/match.hpp"
#include "ringside/pools/pool.hpp"
#include "ringside/rating/stats.hpp"
#include "ringside/rating/tournament.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::orchestrator {

namespace fs = std::filesystem;

// Runnable spec for a global-pool member.
runtime::PolicySpec member_spec(const pools::GlobalPool& pool, const pools::PolicyRecord& record,
                                const runtime::RuntimeSettings& settings);

fs::path matches_dir(const fs::path& pool_root);

// Transcripts are written to `record_dir/<match_id>.jsonl` when set.
rating::MatchFn pool_match_fn(const pools::GlobalPool& pool, const arena::EnvConfig& env,
                              const runtime::RuntimeSettings& settings,
                              std::optional<fs::path> record_dir = std::nullopt);

struct EvaluateResult {
    rating::MatchStats stats;  // from a's point of view
    std::vector<arena::MatchRecord> records;
};

// L matches, a takes team_0 in even matches. Throws LookupError for unknown ids.
EvaluateResult evaluate(const pools::GlobalPool& pool, const std::string& a, const std::string& b, int L,
                        std::uint64_t seed, const arena::EnvConfig& env, const runtime::RuntimeSettings& settings,
                        std::optional<fs::path> record_dir = std::nullopt);

// Tournament over the pool; ratings and counts are stored and elo.csv rewritten.
rating::TournamentResult run_pool_tournament(pools::GlobalPool& pool, const rating::TournamentConfig& config,
                                             const arena::EnvConfig& env, const runtime::RuntimeSettings& settings,
                                             std::optional<fs::path> record_dir = std::nullopt);

void export_elo(const pools::GlobalPool& pool, const fs::path& out);

// Step-by-step listing of a recorded match. Throws LookupError if missing.
void replay(const fs::path& pool_root, const std::string& match_id, std::ostream& out);

}  // namespace ringside::orchestrator
