#include "ringside/planner/mock.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "ringside/common/errors.hpp"
#include "ringside/runtime/builtin.hpp"

namespace ringside::planner {

using nlohmann::json;

namespace {

const std::regex& timestamp_re() {
    static const std::regex re(R"(\d{8}_\d{6}|\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}Z?)");
    return re;
}

std::string normalize_ws(const std::string& s) {
    std::string out;
    bool space = false;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r') {
            space = !out.empty();
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

// Text between the first "```...\n" fence and the closing fence.
std::string fenced_body(const std::string& text) {
    const auto open = text.find("```");
    if (open == std::string::npos) return text;
    const auto body = text.find('\n', open);
    if (body == std::string::npos) return text;
    const auto close = text.find("\n```", body);
    return text.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1);
}

std::string canned_reflection(const std::string& user) {
    std::string wf = "unknown";
    static const std::regex rs_re(R"re("rs"\s*:\s*\[([^\]]*)\])re");
    std::smatch m;
    if (std::regex_search(user, m, rs_re)) {
        const std::string list = m[1].str();
        const auto comma = list.find_last_of(',');
        wf = normalize_ws(comma == std::string::npos ? list : list.substr(comma + 1));
    }
    return fmt::format(
        "#Reflection: The agent ended the evaluation with a running win fraction of {}. It loses ground "
        "when it pushes without checking how close the boundary is.\n"
        "#Code error:\n"
        "1. act: the push decision ignores the distance to the boundary.\n"
        "#Improvement Recommendations:\n"
        "1. Measure the boundary distance first and back off when it drops below a margin.\n",
        wf);
}

}  // namespace

std::string mock_summarize(const std::string& memory) {
    std::istringstream in(memory);
    std::string line;
    std::set<std::string> seen;
    std::string out;
    while (std::getline(in, line)) {
        std::string cleaned = normalize_ws(std::regex_replace(line, timestamp_re(), ""));
        // a heading that only held a timestamp is now bare punctuation
        if (cleaned.find_first_not_of("#-*: ") == std::string::npos) continue;
        if (!seen.insert(cleaned).second) continue;
        out += cleaned;
        out += '\n';
    }
    return out;
}

std::string heuristic_reply(double aggression, const std::string& rationale) {
    runtime::HeuristicParams p;
    p.aggression = std::clamp(aggression, 0.0, 1.0);
    return "```heuristic\n" + runtime::format_heuristic_source(p) + "```\n#Rationale: " + rationale + "\n";
}

std::shared_ptr<MockLlm> MockLlm::from_script(const std::string& script_ref) {
    auto mock = std::make_shared<MockLlm>();
    if (script_ref == "ladder") {
        mock->set_ladder({});
        return mock;
    }
    std::ifstream in(script_ref);
    if (!in) throw ConfigError("cannot read mock llm script " + script_ref);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("mock llm script " + script_ref + ": " + e.what());
    }
    try {
        if (j.contains("by_hash")) {
            for (const auto& [h, reply] : j.at("by_hash").items()) mock->add_reply(h, reply.get<std::string>());
        }
        if (j.contains("by_kind")) {
            for (const auto& [kind, replies] : j.at("by_kind").items()) {
                for (const auto& r : replies) mock->queue(prompt_kind_from_string(kind), r.get<std::string>());
            }
        }
        mock->set_repeat_last(j.value("repeat_last", false));
        if (j.contains("ladder")) {
            const json& l = j.at("ladder");
            LadderSettings s;
            s.start = l.value("start", s.start);
            s.step = l.value("step", s.step);
            s.weak_init = l.value("weak_init", s.weak_init);
            mock->set_ladder(s);
        }
    } catch (const json::exception& e) {
        throw ConfigError("mock llm script " + script_ref + ": " + e.what());
    } catch (const ContractViolation& e) {
        throw ConfigError("mock llm script " + script_ref + ": " + e.what());
    }
    return mock;
}

void MockLlm::add_reply(const std::string& hash, std::string reply) {
    std::lock_guard lock(mutex_);
    by_hash_[hash] = std::move(reply);
}

void MockLlm::queue(PromptKind kind, std::string reply) {
    std::lock_guard lock(mutex_);
    by_kind_[kind].push_back(std::move(reply));
}

int MockLlm::rungs_issued() const {
    std::lock_guard lock(mutex_);
    return next_rung_;
}

std::string MockLlm::chat(const ChatRequest& request) {
    std::lock_guard lock(mutex_);
    if (auto it = by_hash_.find(prompt_hash(request)); it != by_hash_.end()) return it->second;

    if (auto it = by_kind_.find(request.kind); it != by_kind_.end() && !it->second.empty()) {
        std::string reply = it->second.front();
        if (it->second.size() > 1 || !repeat_last_) it->second.pop_front();
        return reply;
    }

    if (ladder_ && (request.kind == PromptKind::init || request.kind == PromptKind::iter)) {
        if (request.kind == PromptKind::init && first_init_done_) {
            return heuristic_reply(ladder_->weak_init, "A cautious baseline that pushes gently.");
        }
        first_init_done_ = true;
        const double aggression = ladder_->start + ladder_->step * next_rung_;
        ++next_rung_;
        return heuristic_reply(aggression,
                               fmt::format("Engage at {:.0f}% of the maximum force while guarding the boundary.",
                                           std::min(aggression, 1.0) * 100.0));
    }

    switch (request.kind) {
        case PromptKind::compact: {
            const auto open = request.user.find("<<<\n");
            const auto close = request.user.rfind("\n>>>");
            if (open == std::string::npos || close == std::string::npos || close < open + 4) {
                return mock_summarize(request.user);
            }
            return mock_summarize(request.user.substr(open + 4, close - open - 4));
        }
        case PromptKind::reflect: return canned_reflection(request.user);
        case PromptKind::debug: {
            const auto code_at = request.user.find("Code:\n");
            const std::string code =
                fenced_body(code_at == std::string::npos ? request.user : request.user.substr(code_at));
            return "```\n" + code + "\n```\n";
        }
        default: break;
    }
    throw GatewayError(fmt::format("mock llm has no reply for a {} prompt", to_string(request.kind)));
}

}  // namespace ringside::planner
