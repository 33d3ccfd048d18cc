#pragma once

#include <stdexcept>
#include <string>

namespace twist {

enum class ErrorKind {
    InvalidInput,
    NotFound,
    Io,
    InvariantViolation,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid(const std::string& message) {
    throw Error(ErrorKind::InvalidInput, message);
}

[[noreturn]] inline void throw_not_found(const std::string& message) {
    throw Error(ErrorKind::NotFound, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
    throw Error(ErrorKind::Io, message);
}

[[noreturn]] inline void throw_invariant(const std::string& message) {
    throw Error(ErrorKind::InvariantViolation, message);
}

} // namespace twist
