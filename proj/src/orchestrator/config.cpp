#include "ringside/orchestrator/config.hpp"

#include <charconv>
#include <functional>
#include <map>
#include <regex>
#include <sstream>

#include <CLI11.hpp>

#include "ringside/common/errors.hpp"
#include "ringside/common/files.hpp"
#include "ringside/common/timestamp.hpp"

namespace ringside::orchestrator {

namespace {

using Setter = std::function<void(const std::vector<std::string>&)>;

const std::string& single(const std::string& key, const std::vector<std::string>& in) {
    if (in.size() != 1) throw ConfigError(key + ": expected a single value");
    return in.front();
}

template <typename T>
T number(const std::string& key, const std::vector<std::string>& in) {
    const std::string& s = single(key, in);
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw ConfigError(key + ": not a number: '" + s + "'");
    return v;
}

bool boolean(const std::string& key, const std::vector<std::string>& in) {
    const std::string& s = single(key, in);
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

template <typename T>
Setter num(T& slot) {
    return [&slot](const std::vector<std::string>& in) { slot = number<T>("", in); };
}

Setter flag(bool& slot) {
    return [&slot](const std::vector<std::string>& in) { slot = boolean("", in); };
}

Setter text(std::string& slot) {
    return [&slot](const std::vector<std::string>& in) { slot = single("", in); };
}

Setter millis(std::chrono::milliseconds& slot) {
    return [&slot](const std::vector<std::string>& in) { slot = std::chrono::milliseconds(number<long>("", in)); };
}

std::map<std::string, Setter> setters(RunConfig& c) {
    std::map<std::string, Setter> s;
    s["pool"] = [&c](const auto& in) { c.pool = single("", in); };
    s["iteration_budget"] = num(c.iteration_budget);
    s["promotion_threshold"] = num(c.promotion_threshold);
    s["max_local_iters"] = num(c.max_local_iters);
    s["k_opponents"] = num(c.k_opponents);
    s["L"] = num(c.L);
    s["temperature"] = num(c.temperature);
    s["debug_rounds"] = num(c.debug_rounds);
    s["memory_budget"] = num(c.memory_budget);
    s["early_stop"] = num(c.early_stop);
    s["policy_format"] = text(c.policy_format);
    s["prompts_dir"] = text(c.prompts_dir);
    s["seed"] = num(c.seed);
    s["id_start"] = [&c](const auto& in) {
        const std::string v = single("", in);
        if (v.empty()) {
            c.id_start.reset();
        } else {
            c.id_start = v;
        }
    };

    s["tournament.n"] = num(c.tournament.n);
    s["tournament.t"] = num(c.tournament.t);
    s["tournament.matches_per_pair"] = num(c.tournament.matches_per_pair);
    s["tournament.k_factor"] = num(c.tournament.k_factor);
    s["tournament.seed"] = num(c.tournament.base_seed);

    s["llm.backend"] = [&c](const auto& in) {
        const std::string& b = single("", in);
        if (b == "http") c.llm.backend = planner::LlmBackend::http;
        else if (b == "mock") c.llm.backend = planner::LlmBackend::mock;
        else throw ConfigError("unknown llm backend '" + b + "'");
    };
    s["llm.base_url"] = text(c.llm.base_url);
    s["llm.model"] = text(c.llm.model);
    s["llm.api_key_env"] = text(c.llm.api_key_env);
    s["llm.request_timeout_ms"] = millis(c.llm.request_timeout);
    s["llm.max_retries"] = num(c.llm.max_retries);
    s["llm.backoff_ms"] = millis(c.llm.backoff_initial);
    s["llm.script"] = text(c.llm.script);

    arena::EnvConfig& e = c.env;
    s["env.arena_radius"] = num(e.arena_radius);
    s["env.agent_radius"] = num(e.agent_radius);
    s["env.agent_mass"] = num(e.agent_mass);
    s["env.decay_factor"] = num(e.decay_factor);
    s["env.v_max"] = num(e.v_max);
    s["env.force_min"] = num(e.force_min);
    s["env.force_max"] = num(e.force_max);
    s["env.angle_min"] = num(e.angle_min);
    s["env.angle_max"] = num(e.angle_max);
    s["env.energy_max"] = num(e.energy_max);
    s["env.energy_recovery_rate"] = num(e.energy_recovery_rate);
    s["env.energy_cost_coeff"] = num(e.energy_cost_coeff);
    s["env.unfatigue_fraction"] = num(e.unfatigue_fraction);
    s["env.restitution"] = num(e.restitution);
    s["env.friction_coeff"] = num(e.friction_coeff);
    s["env.start_offset_fraction"] = num(e.start_offset_fraction);
    s["env.max_steps"] = num(e.max_steps);
    s["env.obs_size"] = num(e.obs_size);
    s["env.cell_scale"] = num(e.cell_scale);

    s["ablations.aux_info"] = flag(c.ablations.aux_info);
    s["ablations.two_step_reflection"] = flag(c.ablations.two_step_reflection);
    s["ablations.reflection_memory"] = flag(c.ablations.reflection_memory);

    s["runtime.harness"] = [&c](const std::vector<std::string>& in) { c.runtime.harness_command = in; };
    s["runtime.working_dir"] = text(c.runtime.working_dir);
    s["runtime.act_timeout_ms"] = millis(c.runtime.act_timeout);
    s["runtime.init_timeout_ms"] = millis(c.runtime.init_timeout);
    return s;
}

}  // namespace

void RunConfig::validate() const {
    if (!(promotion_threshold > 0.0 && promotion_threshold <= 1.0)) {
        throw ConfigError("promotion_threshold must be in (0, 1]");
    }
    if (iteration_budget < 1) throw ConfigError("iteration_budget must be >= 1");
    if (max_local_iters < 0) throw ConfigError("max_local_iters must be >= 0");
    if (k_opponents < 1) throw ConfigError("k_opponents must be >= 1");
    if (L < k_opponents) throw ConfigError("L must be >= k_opponents");
    if (!(temperature > 0.0)) throw ConfigError("temperature must be > 0");
    if (debug_rounds < 1) throw ConfigError("debug_rounds must be >= 1");
    if (memory_budget < 1) throw ConfigError("memory_budget must be >= 1");
    if (early_stop < 0) throw ConfigError("early_stop must be >= 0");
    if (policy_format != "python" && policy_format != "heuristic") {
        throw ConfigError("policy_format must be python or heuristic");
    }
    if (id_start && !parse_policy_id(*id_start)) throw ConfigError("id_start must look like YYYYMMDD_HHMMSS");
    tournament.validate();
    llm.validate();
    env.validate();
}

// CLI11 reads "[env]  # note" as a key; drop trailing comments on table headers.
static std::string strip_header_comments(const std::string& text) {
    static const std::regex header_re(R"(^(\s*\[[^\]"']+\])\s*#.*$)");
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line)) {
        out += std::regex_replace(line, header_re, "$1");
        out += '\n';
    }
    return out;
}

RunConfig parse_run_config(const std::string& text) {
    RunConfig c;
    auto table = setters(c);
    std::istringstream in(strip_header_comments(text));
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        const std::string key = item.fullname();
        auto it = table.find(key);
        if (it == table.end()) throw ConfigError("config: unknown key '" + key + "'");
        try {
            it->second(item.inputs);
        } catch (const ConfigError& e) {
            throw ConfigError("config: " + key + e.what());
        }
    }
    c.validate();
    return c;
}

RunConfig load_run_config(const std::filesystem::path& file) {
    if (!std::filesystem::exists(file)) throw ConfigError("config file not found: " + file.string());
    return parse_run_config(read_file(file));
}

}  // namespace ringside::orchestrator
