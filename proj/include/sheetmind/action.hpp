#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sheetmind/address.hpp"
#include "sheetmind/cell.hpp"

namespace sheetmind {

enum class Verb {
    SELECT,
    SET,
    DELETE,
    DELETE_ROWS,
    INSERT_ROWS,
    INSERT_COLS,
    DELETE_COLS,
    SORT,
    COPY,
    AGGREGATE,
};

inline constexpr std::array kAllVerbs = {
    Verb::SELECT,      Verb::SET,         Verb::DELETE, Verb::DELETE_ROWS, Verb::INSERT_ROWS,
    Verb::INSERT_COLS, Verb::DELETE_COLS, Verb::SORT,   Verb::COPY,        Verb::AGGREGATE,
};

std::string_view to_string(Verb v);
std::optional<Verb> verb_from_string(std::string_view s);

/// A literal argument: Text, Number, Bool or Date.
struct Literal {
    CellValue value;
    friend bool operator==(const Literal&, const Literal&) = default;
};

/// `key=value`; value is a literal, with bare words (SUM, ASC, C) as Text.
struct Named {
    std::string key;
    CellValue value;
    friend bool operator==(const Named&, const Named&) = default;
};

using Arg = std::variant<Range, Literal, Named>;

enum class CmpOp { eq, ne, lt, le, gt, ge };
std::string_view to_string(CmpOp op);

struct Condition {
    enum class Kind { And, Or, Not, Cmp, Matches, IsEmpty };

    Kind kind = Kind::IsEmpty;
    std::vector<Condition> children;  // And/Or: two or more; Not: exactly one
    CmpOp op = CmpOp::eq;             // Cmp
    CellValue literal;                // Cmp
    std::string pattern;              // Matches

    static Condition all_of(std::vector<Condition> cs) { return {Kind::And, std::move(cs), {}, {}, {}}; }
    static Condition any_of(std::vector<Condition> cs) { return {Kind::Or, std::move(cs), {}, {}, {}}; }
    static Condition negate(Condition c) { return {Kind::Not, {std::move(c)}, {}, {}, {}}; }
    static Condition compare(CmpOp op, CellValue v) { return {Kind::Cmp, {}, op, std::move(v), {}}; }
    static Condition matches(std::string re) { return {Kind::Matches, {}, {}, {}, std::move(re)}; }
    static Condition is_empty() { return {Kind::IsEmpty, {}, {}, {}, {}}; }

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// The (op, args, cond) triple.
struct Action {
    Verb op = Verb::SELECT;
    std::vector<Arg> args;
    std::optional<Condition> cond;

    friend bool operator==(const Action&, const Action&) = default;

    /// Positional (non-named) arguments in order.
    std::vector<const Arg*> positional() const;
    const Named* named(std::string_view key) const;
};

/// Positional argument kinds in a verb signature.
enum class ArgKind { range, number, literal };

struct NamedSpec {
    std::string_view key;
    bool required;
    /// Number-valued when true; otherwise a bare word drawn from `words`
    /// (or column letters when `words` is empty).
    bool numeric;
    std::span<const std::string_view> words;
};

struct Signature {
    Verb verb;
    std::span<const ArgKind> positional;
    std::span<const NamedSpec> named;
    bool conditionable;
    bool cond_required;
};

const Signature& signature(Verb v);

/// Checks arity, argument kinds, named keys/values and condition
/// permission. Returns the problem, or nullopt when the shape is right.
std::optional<std::string> check_signature(const Action& a);

struct Verdict {
    enum class Code { parse, arity, bounds, verb, regex, semantic };

    bool valid = true;
    Code code = Code::semantic;
    std::string reason;

    static Verdict ok() { return {}; }
    static Verdict invalid(Code code, std::string reason) {
        if (reason.empty()) reason = "invalid action";
        return {false, code, std::move(reason)};
    }

    friend bool operator==(const Verdict&, const Verdict&) = default;
};

std::string_view to_string(Verdict::Code c);

}  // namespace sheetmind
