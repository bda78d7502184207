#include "ringside/critic/memory.hpp"

#include <regex>
#include <sstream>

#include <spdlog/spdlog.h>

#include "ringside/common/files.hpp"

namespace ringside::critic {

namespace {

const std::regex& timestamp_re() {
    static const std::regex re(R"(\d{8}_\d{6}|\d{4}-\d{2}-\d{2}[T ]\d{2}:\d{2}:\d{2}Z?)");
    return re;
}

std::string one_line(const std::string& s) {
    std::string out;
    for (char c : s) out.push_back(c == '\n' || c == '\r' ? ' ' : c);
    return out;
}

// Drops whole lines from the front until the text fits.
std::string drop_oldest(const std::string& text, std::size_t budget) {
    std::size_t pos = 0;
    while (text.size() - pos > budget) {
        const auto nl = text.find('\n', pos);
        if (nl == std::string::npos) return {};
        pos = nl + 1;
    }
    return text.substr(pos);
}

}  // namespace

void ReflectionMemory::save(const std::filesystem::path& file) const { write_file_atomic(file, digest); }

ReflectionMemory ReflectionMemory::load(const std::filesystem::path& file, std::size_t char_budget) {
    ReflectionMemory m;
    m.char_budget = char_budget;
    if (std::filesystem::exists(file)) m.digest = read_file(file);
    return m;
}

std::string report_digest(const ReflectionReport& report, const std::string& iteration_id) {
    std::string out = "### " + iteration_id + "\n";
    out += "- Summary: " + one_line(report.summary) + "\n";
    for (const auto& f : report.flaws) out += "- Flaw: " + one_line(f) + "\n";
    for (const auto& e : report.code_errors) {
        out += "- Error";
        if (!e.location.empty()) out += " in " + one_line(e.location);
        out += ": " + one_line(e.description) + "\n";
    }
    for (const auto& i : report.improvements) out += "- Fix: " + one_line(i) + "\n";
    return out;
}

std::string strip_timestamps(const std::string& text) { return std::regex_replace(text, timestamp_re(), ""); }

bool contains_timestamp(const std::string& text) { return std::regex_search(text, timestamp_re()); }

planner::ChatRequest build_compact_request(const std::string& digest, const planner::PromptLibrary& prompts) {
    planner::ChatRequest req;
    req.kind = planner::PromptKind::compact;
    req.system = prompts.get("compact_system");
    req.user = planner::render_template(prompts.get("compact_user"), {{"memory", digest}});
    return req;
}

std::string compact_digest(const std::string& digest, planner::LlmGateway& llm, const planner::PromptLibrary& prompts) {
    std::string out = strip_timestamps(llm.chat(build_compact_request(digest, prompts)));
    while (!out.empty() && (out.back() == '\n' || out.back() == ' ')) out.pop_back();
    if (!out.empty()) out += "\n";
    if (out.size() > digest.size()) {
        spdlog::warn("memory compaction grew the digest ({} -> {} chars), keeping the previous one", digest.size(),
                     out.size());
        return digest;
    }
    return out;
}

ReflectionMemory append_and_compact(ReflectionMemory memory, const ReflectionReport& report,
                                    const std::string& iteration_id, planner::LlmGateway& llm,
                                    const planner::PromptLibrary& prompts) {
    const std::string block = report_digest(report, iteration_id);
    memory.entries.emplace_back(iteration_id, block);
    if (!memory.digest.empty() && memory.digest.back() != '\n') memory.digest += "\n";
    memory.digest += block;
    if (memory.digest.size() <= memory.char_budget) return memory;

    memory.digest = compact_digest(memory.digest, llm, prompts);
    if (memory.digest.size() > memory.char_budget) {
        spdlog::warn("reflection memory still over budget after compaction, dropping the oldest lines");
        memory.digest = drop_oldest(memory.digest, memory.char_budget);
    }
    return memory;
}

}  // namespace ringside::critic
