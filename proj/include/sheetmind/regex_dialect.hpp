#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>

namespace sheetmind {

/// Longest pattern and deepest group nesting MATCHES accepts.
inline constexpr std::size_t kMaxPatternLength = 1024;
inline constexpr int kMaxGroupDepth = 32;

/// Why `pattern` falls outside the MATCHES dialect (backreferences,
/// lookaround, unbalanced syntax, size limits), or nullopt if it is inside.
/// Does not compile the pattern.
std::optional<std::string> dialect_violation(std::string_view pattern);

/// A compiled MATCHES pattern with unanchored search semantics.
class Pattern {
public:
    /// Throws Error with the reason when the pattern is outside the dialect
    /// or does not compile.
    static Pattern compile(std::string_view source);

    bool search(std::string_view text) const;
    const std::string& source() const { return source_; }

private:
    Pattern(std::string source, std::regex re) : source_(std::move(source)), re_(std::move(re)) {}

    std::string source_;
    std::regex re_;
};

/// Compile check without keeping the result; the reason on failure.
std::optional<std::string> regex_error(std::string_view pattern);

}  // namespace sheetmind
