#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsetlin {

/// Structurally invalid file or document (wrong column count, bad magic, ...).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A value on a specific line could not be parsed.
class ParseError : public FormatError {
public:
    ParseError(std::size_t line, const std::string& what)
        : FormatError("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

    /// Same error, message prefixed with the file it came from.
    ParseError in_file(const std::string& path) const {
        return ParseError(line_, path + ": " + what(), Prefixed{});
    }

private:
    struct Prefixed {};
    ParseError(std::size_t line, const std::string& message, Prefixed)
        : FormatError(message), line_(line) {}

    std::size_t line_;
};

/// An experiment spec failed validation. The message lists every
/// offending field.
class SpecError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace tsetlin
