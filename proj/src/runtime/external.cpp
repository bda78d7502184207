#include "ringside/runtime/external.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "ringside/arena/env.hpp"
#include "ringside/common/errors.hpp"

extern char** environ;

namespace ringside::runtime {

using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::size_t kStderrCap = 64 * 1024;

void ignore_sigpipe_once() {
    static std::once_flag once;
    std::call_once(once, [] { ::signal(SIGPIPE, SIG_IGN); });
}

void close_fd(int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
}

int decode_status(int status) {
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
}

}  // namespace

std::string encode_init_frame(arena::Team side, const arena::EnvConfig& config) {
    ordered_json j;
    j["type"] = "init";
    j["side"] = std::string(arena::to_string(side));
    j["config"] = nlohmann::json(config);
    return j.dump() + "\n";
}

std::string encode_obs_frame(const arena::Observation& obs) {
    ordered_json grid = ordered_json::array();
    for (int r = 0; r < obs.size; ++r) {
        ordered_json row = ordered_json::array();
        for (int c = 0; c < obs.size; ++c) row.push_back(static_cast<int>(obs.at(r, c)));
        grid.push_back(std::move(row));
    }
    ordered_json inner;
    inner["agent_obs"] = std::move(grid);
    inner["id"] = std::string(arena::to_string(obs.id));
    inner["energy"] = obs.energy;
    inner["speed"] = ordered_json::array({obs.speed.x, obs.speed.y});
    ordered_json j;
    j["type"] = "obs";
    j["obs"] = std::move(inner);
    j["controlled_player_index"] = obs.controlled_player_index;
    return j.dump() + "\n";
}

std::string encode_shutdown_frame() { return "{\"type\":\"shutdown\"}\n"; }

std::string encode_act_frame(const arena::Action& action) {
    ordered_json j;
    j["type"] = "act";
    j["action"] = ordered_json::array({action.force, action.angle_delta});
    return j.dump() + "\n";
}

std::string encode_error_frame(const std::string& traceback) {
    ordered_json j;
    j["type"] = "error";
    j["traceback"] = traceback;
    return j.dump() + "\n";
}

arena::Action decode_act_frame(const std::string& line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        throw PolicyFault("non-JSON reply from policy", line);
    }
    if (!j.is_object()) throw PolicyFault("malformed frame", line);
    const std::string type = j.value("type", "");
    if (type == "error") {
        const auto it = j.find("traceback");
        throw PolicyFault("policy raised an error",
                          it != j.end() && it->is_string() ? it->get<std::string>() : line);
    }
    if (type != "act") throw PolicyFault("unexpected frame type '" + type + "'", line);
    const auto it = j.find("action");
    if (it == j.end() || !it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
        throw PolicyFault("malformed action", line);
    }
    arena::Action a{(*it)[0].get<double>(), (*it)[1].get<double>()};
    if (!std::isfinite(a.force) || !std::isfinite(a.angle_delta)) throw PolicyFault("malformed action", line);
    return a;
}

arena::Observation decode_obs_frame(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    if (j.at("type") != "obs") throw ContractViolation("not an obs frame");
    const auto& o = j.at("obs");
    arena::Observation obs;
    const auto& grid = o.at("agent_obs");
    obs.size = static_cast<int>(grid.size());
    for (const auto& row : grid) {
        for (const auto& cell : row) obs.agent_obs.push_back(cell.get<std::uint8_t>());
    }
    obs.id = arena::team_from_string(o.at("id").get<std::string>());
    obs.energy = o.at("energy").get<double>();
    obs.speed = {o.at("speed").at(0).get<double>(), o.at("speed").at(1).get<double>()};
    obs.controlled_player_index = j.at("controlled_player_index").get<int>();
    return obs;
}

ChildProcess::ChildProcess(const ExternalCommand& command) {
    if (command.argv.empty()) throw ConfigError("empty policy command");
    ignore_sigpipe_once();

    int in_pipe[2], out_pipe[2], err_pipe[2];
    if (::pipe2(in_pipe, O_CLOEXEC) != 0) throw PolicyFault("spawn failed", std::strerror(errno));
    if (::pipe2(out_pipe, O_CLOEXEC) != 0) {
        ::close(in_pipe[0]);
        ::close(in_pipe[1]);
        throw PolicyFault("spawn failed", std::strerror(errno));
    }
    if (::pipe2(err_pipe, O_CLOEXEC) != 0) {
        for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]}) ::close(fd);
        throw PolicyFault("spawn failed", std::strerror(errno));
    }

    posix_spawn_file_actions_t actions;
    posix_spawn_file_actions_init(&actions);
    posix_spawn_file_actions_adddup2(&actions, in_pipe[0], 0);
    posix_spawn_file_actions_adddup2(&actions, out_pipe[1], 1);
    posix_spawn_file_actions_adddup2(&actions, err_pipe[1], 2);
    if (!command.working_dir.empty()) {
        posix_spawn_file_actions_addchdir_np(&actions, command.working_dir.c_str());
    }

    posix_spawnattr_t attr;
    posix_spawnattr_init(&attr);
    sigset_t defaults;
    sigemptyset(&defaults);
    sigaddset(&defaults, SIGPIPE);
    posix_spawnattr_setsigdefault(&attr, &defaults);
    posix_spawnattr_setpgroup(&attr, 0);
    posix_spawnattr_setflags(&attr, POSIX_SPAWN_SETPGROUP | POSIX_SPAWN_SETSIGDEF);

    std::vector<char*> argv;
    for (const auto& a : command.argv) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);

    const int rc = ::posix_spawnp(&pid_, argv[0], &actions, &attr, argv.data(), environ);
    posix_spawn_file_actions_destroy(&actions);
    posix_spawnattr_destroy(&attr);

    ::close(in_pipe[0]);
    ::close(out_pipe[1]);
    ::close(err_pipe[1]);
    in_fd_ = in_pipe[1];
    out_fd_ = out_pipe[0];
    err_fd_ = err_pipe[0];
    if (rc != 0) {
        pid_ = -1;
        close_fd(in_fd_);
        close_fd(out_fd_);
        close_fd(err_fd_);
        throw PolicyFault("spawn failed", "cannot run '" + command.argv[0] + "': " + std::strerror(rc));
    }
    ::fcntl(out_fd_, F_SETFL, ::fcntl(out_fd_, F_GETFL) | O_NONBLOCK);
    ::fcntl(err_fd_, F_SETFL, ::fcntl(err_fd_, F_GETFL) | O_NONBLOCK);
}

ChildProcess::~ChildProcess() {
    terminate(std::chrono::milliseconds(0));
    close_fd(in_fd_);
    close_fd(out_fd_);
    close_fd(err_fd_);
}

bool ChildProcess::write(const std::string& data) {
    std::size_t done = 0;
    while (done < data.size()) {
        if (in_fd_ < 0) return false;
        const ssize_t n = ::write(in_fd_, data.data() + done, data.size() - done);
        if (n < 0) {
            if (errno == EINTR) continue;
            return false;
        }
        done += static_cast<std::size_t>(n);
    }
    return true;
}

void ChildProcess::close_stdin() { close_fd(in_fd_); }

void ChildProcess::pump(int timeout_ms) {
    pollfd fds[2];
    nfds_t n = 0;
    if (out_fd_ >= 0 && !out_eof_) fds[n++] = {out_fd_, POLLIN, 0};
    if (err_fd_ >= 0) fds[n++] = {err_fd_, POLLIN, 0};
    if (n == 0) return;
    const int rc = ::poll(fds, n, timeout_ms);
    if (rc <= 0) return;
    char buf[8192];
    for (nfds_t i = 0; i < n; ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        const bool is_out = fds[i].fd == out_fd_;
        for (;;) {
            const ssize_t got = ::read(fds[i].fd, buf, sizeof buf);
            if (got > 0) {
                if (is_out) {
                    out_buf_.append(buf, static_cast<std::size_t>(got));
                } else if (err_buf_.size() < kStderrCap) {
                    err_buf_.append(buf, std::min<std::size_t>(static_cast<std::size_t>(got), kStderrCap - err_buf_.size()));
                }
                continue;
            }
            if (got == 0) {
                if (is_out) {
                    out_eof_ = true;
                } else {
                    close_fd(err_fd_);
                }
            }
            break;  // EAGAIN or EOF
        }
    }
}

std::optional<std::string> ChildProcess::read_line(std::chrono::milliseconds timeout, bool& timed_out) {
    timed_out = false;
    const auto deadline = Clock::now() + timeout;
    for (;;) {
        const auto nl = out_buf_.find('\n');
        if (nl != std::string::npos) {
            std::string line = out_buf_.substr(0, nl);
            out_buf_.erase(0, nl + 1);
            if (!line.empty() && line.back() == '\r') line.pop_back();
            return line;
        }
        if (out_eof_ || out_fd_ < 0) return std::nullopt;
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
        if (left.count() <= 0) {
            timed_out = true;
            return std::nullopt;
        }
        pump(static_cast<int>(left.count()) + 1);
    }
}

bool ChildProcess::try_reap() {
    if (reaped_ || pid_ < 0) return true;
    int status = 0;
    const pid_t r = ::waitpid(pid_, &status, WNOHANG);
    if (r == pid_) {
        reaped_ = true;
        exit_code_ = decode_status(status);
        return true;
    }
    if (r < 0 && errno == ECHILD) {
        reaped_ = true;
        return true;
    }
    return false;
}

int ChildProcess::terminate(std::chrono::milliseconds grace) {
    if (pid_ < 0) return -1;
    if (reaped_ && in_fd_ < 0) return exit_code_.value_or(-1);
    close_stdin();
    const auto deadline = Clock::now() + grace;
    while (!try_reap() && Clock::now() < deadline) {
        pump(5);
        if (out_eof_ && err_fd_ < 0) std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    if (!reaped_) {
        ::kill(-pid_, SIGKILL);
        ::kill(pid_, SIGKILL);
        int status = 0;
        while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
        }
        reaped_ = true;
        exit_code_ = decode_status(status);
    } else {
        // the leader is gone; take down anything it left in its group
        ::kill(-pid_, SIGKILL);
    }
    // collect whatever is still buffered in the pipes
    for (int i = 0; i < 4 && err_fd_ >= 0; ++i) pump(0);
    return exit_code_.value_or(-1);
}

std::string ChildProcess::stderr_text() {
    pump(0);
    return err_buf_;
}

ExternalPolicy::ExternalPolicy(PolicySpec spec) : spec_(std::move(spec)) {
    if (spec_.backend != Backend::external) throw ContractViolation("ExternalPolicy needs an external spec");
}

ExternalPolicy::~ExternalPolicy() {
    try {
        finish();
    } catch (...) {
    }
}

std::optional<pid_t> ExternalPolicy::pid() const {
    if (!child_) return std::nullopt;
    return child_->pid();
}

void ExternalPolicy::fail(const std::string& reason, const std::string& payload) {
    std::string detail = payload;
    if (child_) {
        child_->terminate(std::chrono::milliseconds(100));
        if (auto code = child_->exit_code()) detail += "\n[exit code " + std::to_string(*code) + "]";
        const std::string err = child_->stderr_text();
        if (!err.empty()) detail += "\n--- stderr ---\n" + err;
        child_.reset();
    }
    throw PolicyFault(reason, detail);
}

std::string ExternalPolicy::await_line(std::chrono::milliseconds timeout, const char* phase) {
    bool timed_out = false;
    auto line = child_->read_line(timeout, timed_out);
    if (line) return *line;
    if (timed_out) {
        fail(std::string(phase) + " timed out after " + std::to_string(timeout.count()) + " ms", "");
    }
    fail(std::string("policy process exited during ") + phase, "");
}

void ExternalPolicy::start(arena::Team side, const arena::EnvConfig& config, std::uint64_t) {
    finish();
    child_ = std::make_unique<ChildProcess>(spec_.external);
    if (!child_->write(encode_init_frame(side, config))) fail("policy process exited during init", "");
    const std::string line = await_line(spec_.init_timeout, "init");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
        fail("non-JSON reply from policy", line);
    }
    const std::string type = j.is_object() ? j.value("type", "") : "";
    if (type == "ready") return;
    if (type == "error") fail("policy failed to initialise", j.value("traceback", line));
    fail("unexpected init reply", line);
}

arena::Action ExternalPolicy::act(const arena::Observation& observation) {
    if (!child_) throw UsageError("act called before start");
    if (!child_->write(encode_obs_frame(observation))) fail("policy process exited during act", "");
    const std::string line = await_line(spec_.act_timeout, "act");
    try {
        return decode_act_frame(line);
    } catch (const PolicyFault& f) {
        fail(f.reason(), f.detail());
    }
}

void ExternalPolicy::finish() {
    if (!child_) return;
    child_->write(encode_shutdown_frame());
    child_->terminate(std::chrono::milliseconds(500));
    child_.reset();
}

}  // namespace ringside::runtime
