#include "ringside/runtime/spec.hpp"

#include <charconv>
#include <sstream>

#include "ringside/common/errors.hpp"
#include "ringside/runtime/builtin.hpp"
#include "ringside/runtime/external.hpp"

namespace ringside::runtime {

std::string_view to_string(Backend b) { return b == Backend::builtin ? "builtin" : "external"; }

Backend backend_from_string(std::string_view s) {
    if (s == "builtin") return Backend::builtin;
    if (s == "external") return Backend::external;
    throw ContractViolation("unknown backend '" + std::string(s) + "'");
}

void PolicySpec::validate() const {
    if (act_timeout.count() <= 0) throw ConfigError("act_timeout must be > 0");
    if (init_timeout.count() <= 0) throw ConfigError("init_timeout must be > 0");
    if (backend == Backend::external && external.argv.empty()) {
        throw ConfigError("external policy needs a command");
    }
    if (backend == Backend::builtin && !external.argv.empty()) {
        throw ConfigError("builtin policy must not carry an external command");
    }
}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Value of the first `policy = X` statement, or empty.
std::string first_policy_kind(std::string_view source) {
    std::istringstream in{std::string(source)};
    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "policy") return {};
        return std::string(trim(line.substr(eq + 1)));
    }
    return {};
}

std::uint64_t random_seed(std::string_view source) {
    std::istringstream in{std::string(source)};
    std::string raw;
    while (std::getline(in, raw)) {
        std::string_view line = trim(std::string_view(raw).substr(0, raw.find('#')));
        const auto eq = line.find('=');
        if (eq == std::string_view::npos || trim(line.substr(0, eq)) != "seed") continue;
        const std::string_view v = trim(line.substr(eq + 1));
        std::uint64_t seed = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), seed);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            throw PolicyFault("invalid random policy source", "ValueError: bad seed '" + std::string(v) + "'");
        }
        return seed;
    }
    return 0;
}

}  // namespace

std::optional<BuiltinKind> builtin_kind_of(std::string_view source) {
    const std::string kind = first_policy_kind(source);
    if (kind == "random") return BuiltinKind::random;
    if (kind == "heuristic") return BuiltinKind::heuristic;
    return std::nullopt;
}

PolicySpec spec_for_source(const std::string& source, const std::string& source_path,
                           const RuntimeSettings& settings) {
    PolicySpec spec;
    spec.act_timeout = settings.act_timeout;
    spec.init_timeout = settings.init_timeout;
    if (const auto kind = builtin_kind_of(source)) {
        spec.backend = Backend::builtin;
        spec.builtin_kind = *kind;
        spec.params = source;
        return spec;
    }
    if (settings.harness_command.empty()) {
        throw ConfigError("policy source " + source_path + " needs an external harness, none is configured");
    }
    spec.backend = Backend::external;
    spec.external.argv = settings.harness_command;
    spec.external.argv.push_back("--policy");
    spec.external.argv.push_back(source_path);
    spec.external.working_dir = settings.working_dir;
    return spec;
}

std::unique_ptr<Policy> make_policy(const PolicySpec& spec) {
    spec.validate();
    if (spec.backend == Backend::external) return std::make_unique<ExternalPolicy>(spec);
    if (spec.builtin_kind == BuiltinKind::random) return std::make_unique<RandomPolicy>(random_seed(spec.params));
    return std::make_unique<HeuristicPolicy>(parse_heuristic_source(spec.params));
}

}  // namespace ringside::runtime
