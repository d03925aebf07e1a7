#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sheetmind {

/// Base of every exception thrown by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed A1 text, action text, CSV, or JSON. `position` is a byte offset
/// into the input when one is meaningful, npos otherwise.
class ParseError : public Error {
public:
    ParseError(std::string message, std::size_t position = npos, std::string expected = {})
        : Error(std::move(message)), position_(position), expected_(std::move(expected)) {}

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    std::size_t position() const noexcept { return position_; }
    const std::string& expected() const noexcept { return expected_; }

private:
    std::size_t position_;
    std::string expected_;
};

/// parse_script failure; wraps the per-action error with the action index.
class ScriptParseError : public ParseError {
public:
    ScriptParseError(std::size_t index, const ParseError& inner)
        : ParseError("action " + std::to_string(index) + ": " + inner.what(), inner.position(),
                     inner.expected()),
          index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class UnknownSheetError : public Error {
public:
    explicit UnknownSheetError(const std::string& name) : Error("unknown sheet: " + name) {}
};

class BoundsError : public Error {
public:
    using Error::Error;
};

/// apply_diff given a diff that does not fit the base snapshot.
class DiffMismatchError : public Error {
public:
    using Error::Error;
};

/// execute called with an action that does not pass validate_static.
class SemanticViolation : public Error {
public:
    using Error::Error;
};

}  // namespace sheetmind
