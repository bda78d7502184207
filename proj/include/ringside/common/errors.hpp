#pragma once

#include <stdexcept>
#include <string>

namespace ringside {

// Root of every error the engine raises on purpose.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration value; the message names the violated invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

// API misuse, e.g. stepping a finished episode.
class UsageError : public Error {
public:
    using Error::Error;
};

// A caller broke a documented precondition on an argument value.
class ContractViolation : public Error {
public:
    using Error::Error;
};

// A request that cannot be satisfied by the current data (k > pool size).
class RequestError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class StorageError : public Error {
public:
    using Error::Error;
};

class ConflictError : public Error {
public:
    using Error::Error;
};

// Promotion attempted below the admission threshold.
class GateViolation : public Error {
public:
    using Error::Error;
};

// A policy misbehaved: non-finite action, crash, timeout, malformed frame.
// `detail` carries captured stderr / traceback text for the debug loop.
class PolicyFault : public Error {
public:
    PolicyFault(std::string reason, std::string detail = {})
        : Error(reason), reason_(std::move(reason)), detail_(std::move(detail)) {}

    const std::string& reason() const noexcept { return reason_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    std::string reason_;
    std::string detail_;
};

// LLM transport failure after retries, or a non-retryable auth failure.
class GatewayError : public Error {
public:
    using Error::Error;
};

class StagnationError : public Error {
public:
    using Error::Error;
};

class DebugExhausted : public Error {
public:
    DebugExhausted(const std::string& what, std::string last_traceback)
        : Error(what), last_traceback_(std::move(last_traceback)) {}
    const std::string& last_traceback() const noexcept { return last_traceback_; }

private:
    std::string last_traceback_;
};

class ReflectionError : public Error {
public:
    using Error::Error;
};

}  // namespace ringside
