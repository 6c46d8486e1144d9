#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace cornerforge {

// Validation errors exit the CLI with 1, I/O errors with 2.
enum class ErrorKind { Validation, Io };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), kind_(kind), code_(std::move(code)) {}

    static Error validation(std::string code, const std::string& message) {
        return {ErrorKind::Validation, std::move(code), message};
    }
    static Error io(std::string code, const std::string& message) {
        return {ErrorKind::Io, std::move(code), message};
    }

    ErrorKind kind() const { return kind_; }
    const std::string& code() const { return code_; }

private:
    ErrorKind kind_;
    std::string code_;
};

} // namespace cornerforge
