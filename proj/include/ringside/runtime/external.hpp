#pragma once

#include <sys/types.h>

#include <chrono>
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ringside/runtime/policy.hpp"
#include "ringside/runtime/spec.hpp"

namespace ringside::runtime {

// Wire frames, one JSON object per line.
std::string encode_init_frame(arena::Team side, const arena::EnvConfig& config);
std::string encode_obs_frame(const arena::Observation& obs);
std::string encode_shutdown_frame();
std::string encode_act_frame(const arena::Action& action);
std::string encode_error_frame(const std::string& traceback);

// Decodes a policy -> engine reply to an obs frame. Error frames, non-JSON
// lines and malformed actions raise PolicyFault.
arena::Action decode_act_frame(const std::string& line);
// Rebuilds the observation from an obs frame (used by test fixtures).
arena::Observation decode_obs_frame(const std::string& line);

// A child process with piped stdio. The destructor kills the whole process
// group and reaps it.
class ChildProcess {
public:
    ChildProcess(const ExternalCommand& command);
    ~ChildProcess();
    ChildProcess(const ChildProcess&) = delete;
    ChildProcess& operator=(const ChildProcess&) = delete;

    pid_t pid() const { return pid_; }

    // Writes all of `data`; returns false if the child closed its stdin.
    bool write(const std::string& data);
    // Next stdout line (without newline), or nullopt on EOF / timeout.
    // `timed_out` tells the two apart.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout, bool& timed_out);
    void close_stdin();

    // Waits up to `grace` for exit, then kills. Returns the wait status.
    int terminate(std::chrono::milliseconds grace);
    std::optional<int> exit_code() const { return exit_code_; }
    // Captured stderr (bounded).
    std::string stderr_text();

private:
    void pump(int timeout_ms);
    bool try_reap();

    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    int err_fd_ = -1;
    std::string out_buf_;
    std::string err_buf_;
    bool out_eof_ = false;
    bool reaped_ = false;
    std::optional<int> exit_code_;
};

// Runs one external policy process for the duration of a match.
class ExternalPolicy final : public Policy {
public:
    explicit ExternalPolicy(PolicySpec spec);
    ~ExternalPolicy() override;

    void start(arena::Team side, const arena::EnvConfig& config, std::uint64_t match_seed) override;
    arena::Action act(const arena::Observation& observation) override;
    void finish() override;

    std::optional<pid_t> pid() const;

private:
    [[noreturn]] void fail(const std::string& reason, const std::string& payload);
    std::string await_line(std::chrono::milliseconds timeout, const char* phase);

    PolicySpec spec_;
    std::unique_ptr<ChildProcess> child_;
};

}  // namespace ringside::runtime
