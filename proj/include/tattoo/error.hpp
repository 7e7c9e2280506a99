#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tattoo {

/// Malformed or inconsistent user input (program text, type text, goal, flags).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t column)
        : InputError(what + " at line " + std::to_string(line) + ", column " + std::to_string(column)),
          line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Request body or file larger than the configured limit.
class SizeLimitError : public InputError {
public:
    using InputError::InputError;
};

/// State cap or wall-clock budget exhausted.
class ResourceLimitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Broken internal invariant; should never reach a user.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace tattoo
