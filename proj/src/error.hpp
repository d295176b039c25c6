#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sift {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input model: unknown names, arity mismatches, contradictory literals.
class StructuralError : public Error {
public:
    using Error::Error;
};

/// A ground action was applied in a state where its preconditions do not hold.
class InapplicableActionError : public Error {
public:
    using Error::Error;
};

/// A configured size limit (node cap, group cap, oracle cap) was exceeded.
class LimitError : public Error {
public:
    using Error::Error;
};

/// Invalid configuration values.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Sampling could not produce data (e.g. no applicable action in the initial state).
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Input graph has no edges, so there is nothing to learn from.
class EmptyInputError : public Error {
public:
    using Error::Error;
};

/// Byte offsets are half-open [start, end); line and column are 1-based.
struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
    std::size_t line = 1;
    std::size_t column = 1;

    bool operator==(const SourceSpan&) const = default;
};

class ParseError : public Error {
public:
    ParseError(const std::string& message, SourceSpan span)
        : Error(format(message, span)), message_(message), span_(span) {}

    const SourceSpan& span() const noexcept { return span_; }
    const std::string& bare_message() const noexcept { return message_; }

private:
    static std::string format(const std::string& message, const SourceSpan& span) {
        return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " + message;
    }

    std::string message_;
    SourceSpan span_;
};

}  // namespace sift
