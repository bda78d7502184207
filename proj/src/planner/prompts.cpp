#include "ringside/planner/prompts.hpp"

#include <fmt/format.h>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"
#include "ringside/planner/prompt_assets.hpp"
#include "ringside/common/files.hpp"

namespace ringside::planner {

const PromptLibrary& PromptLibrary::embedded() {
    static const PromptLibrary lib = [] {
        PromptLibrary l;
        for (const auto& [name, text] : embedded_prompt_assets()) l.templates_.emplace(name, text);
        return l;
    }();
    return lib;
}

PromptLibrary PromptLibrary::with_overrides(const std::filesystem::path& dir) {
    PromptLibrary lib = embedded();
    if (dir.empty()) return lib;
    if (!std::filesystem::is_directory(dir)) throw ConfigError("prompt directory " + dir.string() + " does not exist");
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (!e.is_regular_file() || e.path().extension() != ".txt") continue;
        const std::string file = e.path().filename().string();
        lib.templates_[file.substr(0, file.find('.'))] = read_file(e.path());
    }
    return lib;
}

const std::string& PromptLibrary::get(std::string_view name) const {
    auto it = templates_.find(name);
    if (it == templates_.end()) throw LookupError("no prompt template '" + std::string(name) + "'");
    return it->second;
}

namespace {

const std::string& lookup(const std::map<std::string, std::string>& vars, const std::string& name) {
    auto it = vars.find(name);
    if (it == vars.end()) throw ContractViolation("prompt template uses unknown variable '" + name + "'");
    return it->second;
}

}  // namespace

std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        const std::size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) {
            out.append(tmpl.substr(pos));
            break;
        }
        out.append(tmpl.substr(pos, open - pos));
        const std::size_t close = tmpl.find("}}", open);
        if (close == std::string_view::npos) throw ContractViolation("unterminated tag in prompt template");
        const std::string tag(tmpl.substr(open + 2, close - open - 2));
        std::size_t after = close + 2;
        if (tag.empty() || tag[0] == '/') throw ContractViolation("stray tag {{" + tag + "}} in prompt template");
        if (tag[0] != '#') {
            out += lookup(vars, tag);
            pos = after;
            continue;
        }
        const std::string name = tag.substr(1);
        const std::string end_tag = "{{/" + name + "}}";
        const std::size_t end = tmpl.find(end_tag, after);
        if (end == std::string_view::npos) throw ContractViolation("section '" + name + "' is not closed");
        // a tag alone on its line takes its newline with it
        const bool open_alone = (open == 0 || tmpl[open - 1] == '\n') && after < tmpl.size() && tmpl[after] == '\n';
        if (open_alone) ++after;
        std::size_t next = end + end_tag.size();
        const bool close_alone = (end == 0 || tmpl[end - 1] == '\n') && next < tmpl.size() && tmpl[next] == '\n';
        if (close_alone) ++next;
        const std::string& value = lookup(vars, name);
        if (!value.empty() && value != "false") out += render_template(tmpl.substr(after, end - after), vars);
        pos = next;
    }
    return out;
}

std::string format_number(double v) { return fmt::format("{}", v); }

std::string build_env_prompt(const arena::EnvConfig& c, bool include_aux, const PromptLibrary& library) {
    const std::map<std::string, std::string> vars{
        {"aux", include_aux ? "true" : ""},
        {"arena_radius", format_number(c.arena_radius)},
        {"max_steps", std::to_string(c.max_steps)},
        {"obs_size", std::to_string(c.obs_size)},
        {"center_col", std::to_string(c.obs_size / 2)},
        {"rows_behind", std::to_string(arena::kRowsBehind)},
        {"cell_scale", format_number(c.cell_scale)},
        {"energy_max", format_number(c.energy_max)},
        {"agent_radius", format_number(c.agent_radius)},
        {"agent_mass", format_number(c.agent_mass)},
        {"decay_factor", format_number(c.decay_factor)},
        {"v_max", format_number(c.v_max)},
        {"restitution", format_number(c.restitution)},
        {"friction_coeff", format_number(c.friction_coeff)},
        {"energy_cost_coeff", format_number(c.energy_cost_coeff)},
        {"energy_recovery_rate", format_number(c.energy_recovery_rate)},
        {"unfatigue_energy", format_number(c.unfatigue_fraction * c.energy_max)},
        {"force_min", format_number(c.force_min)},
        {"force_max", format_number(c.force_max)},
        {"angle_min", format_number(c.angle_min)},
        {"angle_max", format_number(c.angle_max)},
    };
    return render_template(library.get("env_info"), vars);
}

}  // namespace ringside::planner
