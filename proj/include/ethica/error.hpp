#pragma once

#include <stdexcept>
#include <string>

namespace ethica {

enum class ErrorKind {
    Parse,       // malformed DSL / expression / CSV input
    Validation,  // structurally well-formed but violates an invariant
    Eval,        // name resolution or typing failure during evaluation
    Transform,   // a transformation's precondition does not hold
    Io           // missing or unreadable file
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

}  // namespace ethica
