#pragma once

#include <chrono>
#include <optional>
#include <set>
#include <string>
#include <string_view>

namespace ringside {

// Policy ids look like `20250801_143000` (YYYYMMDD_HHMMSS, UTC).
std::string format_policy_id(std::chrono::sys_seconds t);
std::optional<std::chrono::sys_seconds> parse_policy_id(std::string_view id);
bool is_policy_id(std::string_view id);

std::string format_iso8601(std::chrono::sys_seconds t);

// Issues unique policy ids. Ids collide when several candidates are created in
// the same second, so a taken id is bumped forward one second at a time.
// A fixed start time makes runs reproducible.
class IdClock {
public:
    IdClock() = default;
    explicit IdClock(std::chrono::sys_seconds fixed_start) : cursor_(fixed_start), fixed_(true) {}

    std::string next(const std::set<std::string>& taken);
    std::chrono::sys_seconds last_time() const { return last_; }

private:
    std::chrono::sys_seconds cursor_{};
    std::chrono::sys_seconds last_{};
    bool fixed_ = false;
};

}  // namespace ringside
