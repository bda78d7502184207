#include "ringside/critic/reflect.hpp"

#include <regex>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ringside/common/errors.hpp"

namespace ringside::critic {

namespace {

constexpr const char* kSummaryTag = "#Reflection:";
constexpr const char* kErrorsTag = "#Code error:";
constexpr const char* kImproveTag = "#Improvement Recommendations:";

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// "1. foo", "- foo", "* foo" -> "foo"; anything else -> empty.
std::string list_item(const std::string& line) {
    static const std::regex item_re(R"(^\s*(?:\d+[.)]|[-*])\s+(.*\S)\s*$)");
    std::smatch m;
    if (std::regex_match(line, m, item_re)) return m[1].str();
    return {};
}

// Items of a list section. Unmarked lines continue the previous item, or
// become items themselves when there is none yet.
std::vector<std::string> list_items(const std::string& section) {
    std::vector<std::string> items;
    std::istringstream in(section);
    std::string line;
    bool open = false;
    while (std::getline(in, line)) {
        const std::string t = trim(line);
        if (t.empty()) {
            open = false;
            continue;
        }
        const std::string item = list_item(line);
        if (!item.empty()) {
            items.push_back(item);
            open = true;
        } else if (open && !items.empty()) {
            items.back() += "\n" + t;
        } else {
            items.push_back(t);
            open = true;
        }
    }
    return items;
}

}  // namespace

ReflectionReport parse_reflection(const std::string& text) {
    const auto s = text.find(kSummaryTag);
    const auto e = text.find(kErrorsTag);
    const auto i = text.find(kImproveTag);
    if (s == std::string::npos || e == std::string::npos || i == std::string::npos) {
        throw ReflectionError("reflection is missing one of the three sections");
    }
    if (!(s < e && e < i)) throw ReflectionError("reflection sections are out of order");

    const std::string summary_part = text.substr(s + std::string(kSummaryTag).size(), e - s - std::string(kSummaryTag).size());
    const std::string errors_part = text.substr(e + std::string(kErrorsTag).size(), i - e - std::string(kErrorsTag).size());
    const std::string improve_part = text.substr(i + std::string(kImproveTag).size());

    ReflectionReport r;
    r.raw = text;
    std::istringstream in(summary_part);
    std::string line;
    std::string paragraph;
    while (std::getline(in, line)) {
        const std::string item = list_item(line);
        if (!item.empty()) {
            r.flaws.push_back(item);
        } else if (!trim(line).empty()) {
            paragraph += (paragraph.empty() ? "" : " ") + trim(line);
        }
    }
    r.summary = paragraph;
    if (r.summary.empty() && !r.flaws.empty()) r.summary = r.flaws.front();
    if (r.summary.empty()) throw ReflectionError("reflection summary is empty");

    for (const std::string& item : list_items(errors_part)) {
        const auto colon = item.find(':');
        if (colon != std::string::npos && colon > 0) {
            r.code_errors.push_back({trim(item.substr(0, colon)), trim(item.substr(colon + 1))});
        } else {
            r.code_errors.push_back({"", item});
        }
    }
    r.improvements = list_items(improve_part);
    if (r.improvements.empty()) throw ReflectionError("reflection has no improvement recommendations");
    return r;
}

planner::ChatRequest build_reflect_request(const std::string& code, const std::string& trajectory_json,
                                           const planner::PromptLibrary& prompts) {
    planner::ChatRequest req;
    req.kind = planner::PromptKind::reflect;
    req.system = trim(prompts.get("reflect_system"));
    req.user = planner::render_template(prompts.get("reflect_user"),
                                        {{"code", trim(code)}, {"trajectory", trajectory_json}});
    return req;
}

ReflectionReport reflect(const std::string& code, const CompressedTrajectory& trajectory, planner::LlmGateway& llm,
                         const planner::PromptLibrary& prompts) {
    if (trajectory.fr.empty()) throw ContractViolation("reflect needs a non-empty trajectory");
    planner::ChatRequest req = build_reflect_request(code, trajectory_to_json(trajectory), prompts);
    try {
        return parse_reflection(llm.chat(req));
    } catch (const ReflectionError& e) {
        spdlog::info("reflection unparseable ({}), asking again", e.what());
    }
    req.user += "\n\n" + trim(prompts.get("reflect_retry"));
    return parse_reflection(llm.chat(req));
}

}  // namespace ringside::critic
