#include "ringside/common/timestamp.hpp"

#include <cctype>
#include <cstdio>

namespace ringside {

namespace {

struct Civil {
    int year;
    unsigned month, day, hour, minute, second;
};

Civil to_civil(std::chrono::sys_seconds t) {
    using namespace std::chrono;
    const auto day_point = floor<days>(t);
    const year_month_day ymd{day_point};
    const hh_mm_ss hms{t - day_point};
    return Civil{static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                 static_cast<unsigned>(ymd.day()), static_cast<unsigned>(hms.hours().count()),
                 static_cast<unsigned>(hms.minutes().count()),
                 static_cast<unsigned>(hms.seconds().count())};
}

}  // namespace

std::string format_policy_id(std::chrono::sys_seconds t) {
    const Civil c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d%02u%02u_%02u%02u%02u", c.year, c.month, c.day, c.hour,
                  c.minute, c.second);
    return buf;
}

std::string format_iso8601(std::chrono::sys_seconds t) {
    const Civil c = to_civil(t);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02u:%02u:%02uZ", c.year, c.month, c.day,
                  c.hour, c.minute, c.second);
    return buf;
}

bool is_policy_id(std::string_view id) {
    if (id.size() != 15 || id[8] != '_') return false;
    for (std::size_t i = 0; i < id.size(); ++i) {
        if (i == 8) continue;
        if (!std::isdigit(static_cast<unsigned char>(id[i]))) return false;
    }
    return true;
}

std::optional<std::chrono::sys_seconds> parse_policy_id(std::string_view id) {
    using namespace std::chrono;
    if (!is_policy_id(id)) return std::nullopt;
    auto num = [&](std::size_t pos, std::size_t len) {
        int v = 0;
        for (std::size_t i = pos; i < pos + len; ++i) v = v * 10 + (id[i] - '0');
        return v;
    };
    const year_month_day ymd{year{num(0, 4)}, month{static_cast<unsigned>(num(4, 2))},
                             day{static_cast<unsigned>(num(6, 2))}};
    if (!ymd.ok()) return std::nullopt;
    const int h = num(9, 2), m = num(11, 2), s = num(13, 2);
    if (h > 23 || m > 59 || s > 59) return std::nullopt;
    return sys_days{ymd} + hours{h} + minutes{m} + seconds{s};
}

std::string IdClock::next(const std::set<std::string>& taken) {
    using namespace std::chrono;
    if (!fixed_) {
        const auto now = floor<seconds>(system_clock::now());
        if (now > cursor_) cursor_ = now;
    }
    std::string id = format_policy_id(cursor_);
    while (taken.count(id) != 0) {
        cursor_ += seconds{1};
        id = format_policy_id(cursor_);
    }
    last_ = cursor_;
    cursor_ += seconds{1};
    return id;
}

}  // namespace ringside
