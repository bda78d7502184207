#pragma once

#include <map>
#include <string>

namespace ringside::planner {

// Templates compiled in from assets/prompts (file stem without version suffix).
const std::map<std::string, std::string, std::less<>>& embedded_prompt_assets();

}  // namespace ringside::planner
