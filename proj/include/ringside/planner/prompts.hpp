#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "ringside/arena/config.hpp"

namespace ringside::planner {

// Template store. Names are asset file names without extensions
// (`env_info.v1.txt` -> "env_info").
class PromptLibrary {
public:
    static const PromptLibrary& embedded();
    // Embedded templates, replaced by any `<name>.*txt` found in `dir`.
    static PromptLibrary with_overrides(const std::filesystem::path& dir);

    // Throws LookupError.
    const std::string& get(std::string_view name) const;

private:
    std::map<std::string, std::string, std::less<>> templates_;
};

// `{{name}}` substitutes vars[name]. `{{#name}}...{{/name}}` keeps its body
// only when vars[name] is non-empty and not "false". Unknown names throw
// ContractViolation so template typos surface in tests.
std::string render_template(std::string_view tmpl, const std::map<std::string, std::string>& vars);

// Numbers as the prompt shows them: shortest round-trip form.
std::string format_number(double v);

std::string build_env_prompt(const arena::EnvConfig& config, bool include_aux,
                             const PromptLibrary& library = PromptLibrary::embedded());

}  // namespace ringside::planner
