#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace agora {

/// Base class for all library-defined failures. Argument-validation
/// failures use std::invalid_argument directly; contract violations
/// detected at runtime use std::logic_error.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by the AF, Turtle and scenario parsers. `line` is 1-based;
/// `column` is 1-based where the lexer tracks it, 0 otherwise.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t column = 0)
        : Error(format(message, line, column)), line_(line), column_(column) {}

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    static std::string format(const std::string& message, std::size_t line, std::size_t column) {
        std::string out = "line " + std::to_string(line);
        if (column > 0) {
            out += ", column " + std::to_string(column);
        }
        return out + ": " + message;
    }

    std::size_t line_;
    std::size_t column_;
};

/// A class-hierarchy update would introduce a subclass cycle.
class CycleError : public Error {
public:
    using Error::Error;
};

/// A declaration references a term that does not exist, or instance
/// data uses vocabulary the terminology does not declare.
class DeclarationError : public Error {
public:
    using Error::Error;
};

/// An identifier was introduced twice where uniqueness is required.
class DuplicateError : public Error {
public:
    using Error::Error;
};

/// A scripted backend was asked about an input its fixture does not
/// cover. Scripted runs fail loudly rather than guessing.
class FixtureGapError : public Error {
public:
    using Error::Error;
};

/// A perspective backend failed to produce a usable result (transport
/// failure, schema violation, contract breach in its output).
class BackendError : public Error {
public:
    using Error::Error;
};

/// A scenario document is malformed; the message names the offending field.
class ScenarioError : public Error {
public:
    using Error::Error;
};

}  // namespace agora
