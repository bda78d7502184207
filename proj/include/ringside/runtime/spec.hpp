#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringside/arena/config.hpp"
#include "ringside/runtime/policy.hpp"

namespace ringside::runtime {

enum class Backend { builtin, external };
enum class BuiltinKind { random, heuristic };

std::string_view to_string(Backend b);
Backend backend_from_string(std::string_view s);

struct ExternalCommand {
    std::vector<std::string> argv;  // argv[0] is looked up on PATH
    std::string working_dir;        // empty: inherit
};

struct PolicySpec {
    Backend backend = Backend::builtin;
    BuiltinKind builtin_kind = BuiltinKind::random;
    std::string params;  // builtin parameter blob (source text)
    ExternalCommand external;
    std::chrono::milliseconds act_timeout{1000};
    std::chrono::milliseconds init_timeout{10000};

    // Throws ConfigError.
    void validate() const;
};

// How policy sources that are not builtin blobs get executed.
struct RuntimeSettings {
    std::vector<std::string> harness_command;  // the source path is passed as `--policy <path>`
    std::string working_dir;
    std::chrono::milliseconds act_timeout{1000};
    std::chrono::milliseconds init_timeout{10000};
};

// Kind named by a leading `policy = random` / `policy = heuristic`
// statement; nullopt for anything else.
std::optional<BuiltinKind> builtin_kind_of(std::string_view source);
inline bool is_builtin_source(std::string_view source) { return builtin_kind_of(source).has_value(); }

// Builtin blobs run in-process; anything else runs under the harness with
// `source_path` as its policy file.
PolicySpec spec_for_source(const std::string& source, const std::string& source_path,
                           const RuntimeSettings& settings);

// Heuristic blobs are parsed here, so source errors surface as PolicyFault.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec);

}  // namespace ringside::runtime
