#pragma once

#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ringside/runtime/spec.hpp"

namespace ringside::pools {

struct PolicyRecord {
    std::string id;  // YYYYMMDD_HHMMSS
    runtime::Backend backend = runtime::Backend::builtin;
    std::string source;      // artifact text, stored next to meta.json
    std::string source_ref;  // artifact file name inside the policy directory
    double elo = 1200.0;
    std::string explanation;
    std::optional<std::string> lineage;
    std::optional<double> promotion_win_fraction;
    std::optional<int> promotion_iteration;
    std::string created_at;  // ISO 8601, UTC
    int games = 0;
    int wins = 0;
    int draws = 0;
    int losses = 0;

    bool operator==(const PolicyRecord&) const = default;
};

// `source.random`, `source.heuristic`, or `source.py` for harness code.
std::string source_filename(const std::string& source);
runtime::Backend backend_for_source(const std::string& source);

// meta.json content; the source text itself is not part of it.
nlohmann::json record_meta(const PolicyRecord& r);
PolicyRecord record_from_meta(const nlohmann::json& j);

}  // namespace ringside::pools
