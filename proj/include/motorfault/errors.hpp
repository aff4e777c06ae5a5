#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace motorfault {

// Base of every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed arguments that violate an operation's contract.
struct UsageError : Error {
    using Error::Error;
};

// Malformed text input (CSV, model file, numeric field). `line` is 1-based,
// 0 when no line context exists.
struct ParseError : Error {
    std::size_t line;
    explicit ParseError(const std::string& message, std::size_t line_number = 0)
        : Error(line_number ? "line " + std::to_string(line_number) + ": " + message
                            : message),
          line(line_number) {}
};

// Vector/matrix shapes do not chain.
struct DimensionError : Error {
    using Error::Error;
};

// Training produced a non-finite loss. `epoch` is 1-based.
struct DivergenceError : Error {
    int epoch;
    explicit DivergenceError(const std::string& message, int epoch_number)
        : Error(message), epoch(epoch_number) {}
};

// File or socket operation failed.
struct IoError : Error {
    using Error::Error;
};

// Malformed wire-protocol record.
struct ProtocolError : Error {
    using Error::Error;
};

}  // namespace motorfault
