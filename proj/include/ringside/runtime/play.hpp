#pragma once

#include <cstdint>

#include "ringside/arena/match.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::runtime {

// run_match over freshly built policies. A policy that cannot even be built
// (bad heuristic source, spawn failure) forfeits like any other fault.
arena::MatchRecord play_match(const PolicySpec& team0, const PolicySpec& team1, const arena::EnvConfig& config,
                              std::uint64_t seed, const arena::MatchOptions& options = {});

}  // namespace ringside::runtime
