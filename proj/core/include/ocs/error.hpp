#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ocs {

// All library errors carry a machine-readable code and the offending field,
// so the CLI can emit one "ERROR <code> <field> <message>" line.
class Error : public std::runtime_error {
public:
    Error(std::string code, std::string field, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)), field_(std::move(field)) {}

    const std::string& code() const noexcept { return code_; }
    const std::string& field() const noexcept { return field_; }

    std::string error_line() const {
        return "ERROR " + code_ + " " + field_ + " " + what();
    }

private:
    std::string code_;
    std::string field_;
};

// Invalid configuration value; `field` names the violated field.
struct ConfigError : Error {
    ConfigError(const std::string& field, const std::string& message)
        : Error("E_CONFIG", field, message) {}
};

// Arguments outside an operation's domain (empty clip, N > T, ...).
struct DomainError : Error {
    DomainError(const std::string& field, const std::string& message)
        : Error("E_DOMAIN", field, message) {}
};

// Numerical-domain failures (degenerate distributions, clamp violations).
struct NumericError : Error {
    NumericError(const std::string& field, const std::string& message)
        : Error("E_NUMERIC", field, message) {}
};

// Training produced a non-finite loss or gradient.
struct DivergenceError : Error {
    DivergenceError(const std::string& field, int epoch, const std::string& message)
        : Error("E_DIVERGED", field, message), epoch(epoch) {}
    int epoch;
};

struct IoError : Error {
    IoError(const std::string& field, const std::string& message)
        : Error("E_IO", field, message) {}
};

struct MissingModelError : Error {
    MissingModelError(const std::string& field, const std::string& message)
        : Error("E_MISSING_MODEL", field, message) {}
};

struct HashMismatchError : Error {
    HashMismatchError(const std::string& field, const std::string& message)
        : Error("E_HASH_MISMATCH", field, message) {}
};

}  // namespace ocs
