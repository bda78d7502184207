#include "ringside/planner/planner.hpp"

#include <spdlog/spdlog.h>

#include "ringside/common/errors.hpp"

namespace ringside::planner {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string with_final_newline(std::string s) {
    while (!s.empty() && (s.back() == '\n' || s.back() == '\r' || s.back() == ' ')) s.pop_back();
    return s + "\n";
}

std::string system_prompt(const std::string& name, const PlannerOptions& options) {
    const PromptLibrary& lib = *options.prompts;
    return render_template(lib.get(name), {{"policy_format", trim(lib.get("policy_format_" + options.policy_format))}});
}

std::string format_seeds(const std::vector<SeedPolicy>& seeds) {
    std::string out;
    for (std::size_t i = 0; i < seeds.size() && i < 3; ++i) {
        const SeedPolicy& s = seeds[i];
        out += "### Policy " + std::to_string(i + 1) + "\n";
        if (!s.explanation.empty()) out += "Explanation: " + trim(s.explanation) + "\n";
        out += "```\n" + with_final_newline(s.code) + "```\n";
    }
    return out;
}

}  // namespace

GeneratedPolicy parse_generation(const std::string& reply) {
    GeneratedPolicy g;
    const auto open = reply.find("```");
    std::string outside;
    if (open == std::string::npos) {
        const auto tag = reply.find("#Rationale:");
        g.source = with_final_newline(trim(reply.substr(0, tag)));
        if (tag != std::string::npos) g.rationale = trim(reply.substr(tag + 11));
        return g;
    }
    const auto body = reply.find('\n', open);
    const auto close = body == std::string::npos ? std::string::npos : reply.find("\n```", body);
    if (body == std::string::npos) {
        g.source = "\n";
    } else {
        g.source = with_final_newline(reply.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1));
    }
    outside = reply.substr(0, open);
    if (close != std::string::npos) {
        const auto after = reply.find('\n', close + 4);
        if (after != std::string::npos) outside += reply.substr(after);
    }
    const auto tag = outside.find("#Rationale:");
    g.rationale = trim(tag == std::string::npos ? outside : outside.substr(tag + 11));
    return g;
}

ChatRequest build_init_request(const PromptBundle& bundle, const PlannerOptions& options) {
    const PromptLibrary& lib = *options.prompts;
    ChatRequest r;
    r.kind = PromptKind::init;
    r.system = system_prompt("generate_system", options);
    r.user = render_template(lib.get("init_user"), {{"env_info", trim(bundle.env_info)},
                                                    {"seeds", format_seeds(bundle.seeds)},
                                                    {"memory", trim(bundle.memory_digest)}});
    return r;
}

ChatRequest build_iter_request(const PromptBundle& bundle, const PlannerOptions& options) {
    if (!bundle.old_code) throw ContractViolation("an iter prompt needs the old code");
    if (!bundle.reflection && !bundle.raw_trajectory) {
        throw ContractViolation("an iter prompt needs a reflection or a raw trajectory");
    }
    const PromptLibrary& lib = *options.prompts;
    ChatRequest r;
    r.kind = PromptKind::iter;
    r.system = system_prompt("generate_system", options);
    r.user = render_template(lib.get("iter_user"), {{"env_info", trim(bundle.env_info)},
                                                    {"memory", trim(bundle.memory_digest)},
                                                    {"old_code", trim(*bundle.old_code)},
                                                    {"reflection", trim(bundle.reflection.value_or(""))},
                                                    {"raw_trajectory", trim(bundle.raw_trajectory.value_or(""))},
                                                    {"task_goal", trim(lib.get("task_goal"))}});
    return r;
}

ChatRequest build_debug_request(const std::string& source, const std::string& traceback,
                                const PlannerOptions& options) {
    ChatRequest r;
    r.kind = PromptKind::debug;
    r.system = system_prompt("debug_system", options);
    r.user = render_template(options.prompts->get("debug_user"),
                             {{"traceback", trim(traceback)}, {"code", trim(source)}});
    return r;
}

GeneratedPolicy generate_initial_policy(const PromptBundle& bundle, LlmGateway& llm, const PlannerOptions& options) {
    return parse_generation(llm.chat(build_init_request(bundle, options)));
}

GeneratedPolicy generate_iter_policy(const PromptBundle& bundle, LlmGateway& llm, const PlannerOptions& options) {
    ChatRequest request = build_iter_request(bundle, options);
    const std::string old = with_final_newline(*bundle.old_code);
    GeneratedPolicy g = parse_generation(llm.chat(request));
    if (g.source != old) return g;
    spdlog::info("iter generation repeated the old code, asking again");
    request.user += "\n\n" + trim(options.prompts->get("iter_retry"));
    g = parse_generation(llm.chat(request));
    if (g.source == old) throw StagnationError("iter generation returned the old code twice");
    return g;
}

std::string debug_policy(const std::string& source, LlmGateway& llm, const Validator& validator, int max_rounds,
                         const PlannerOptions& options) {
    if (max_rounds < 1) throw ContractViolation("debug max_rounds must be >= 1");
    std::string current = source;
    for (int round = 0;; ++round) {
        const runtime::ValidationReport report = validator(current);
        if (report.passed) return current;
        if (round == max_rounds) {
            throw DebugExhausted("policy still fails validation after " + std::to_string(max_rounds) +
                                     " debug rounds: " + report.reason,
                                 report.traceback);
        }
        spdlog::info("validation failed ({}), debug round {}/{}", report.reason, round + 1, max_rounds);
        current = parse_generation(llm.chat(build_debug_request(current, report.traceback, options))).source;
    }
}

int candidate_call_budget(int max_local_iters, int debug_rounds) {
    return (1 + debug_rounds) + max_local_iters * (2 + 1 + 2 + debug_rounds);
}

}  // namespace ringside::planner
