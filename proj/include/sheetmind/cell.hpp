#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

namespace sheetmind {

struct Empty {
    friend bool operator==(Empty, Empty) = default;
};

struct Text {
    std::string value;
    friend bool operator==(const Text&, const Text&) = default;
};

/// ISO-8601 calendar date, always `YYYY-MM-DD` and a real day.
struct Date {
    std::string iso;
    friend bool operator==(const Date&, const Date&) = default;
};

/// Verbatim formula source starting with '='. Never evaluated.
struct Formula {
    std::string source;
    friend bool operator==(const Formula&, const Formula&) = default;
};

using CellValue = std::variant<Empty, Text, double, bool, Date, Formula>;

inline bool is_empty(const CellValue& v) { return std::holds_alternative<Empty>(v); }

/// True for `YYYY-MM-DD` strings naming a valid proleptic Gregorian day
/// with year in 0001..9999.
bool is_valid_date(std::string_view text);

/// Throws Error when `text` is not a valid date.
Date make_date(std::string_view text);

/// Shortest round-trip decimal text for a finite double ("6", "0.5", "1e+20").
std::string format_number(double x);

/// Parses a full decimal string (optional leading '-', fraction, exponent).
/// Rejects infinities, NaN, '+' prefixes and surrounding whitespace.
std::optional<double> parse_number(std::string_view text);

/// Type inference for ingested text: "" -> Empty, "=..." -> Formula,
/// valid date -> Date, true/false (any case) -> Bool, decimal -> Number,
/// otherwise Text.
CellValue infer_cell(std::string_view text);

/// The rule applied to values written by users or actions: Text starting with
/// '=' becomes a Formula and empty Text becomes Empty. Throws Error for a
/// non-finite Number or a malformed Date/Formula.
CellValue normalize_entered(CellValue v);

/// Textual rendering used by MATCHES and CSV export. Empty renders as "".
std::string render(const CellValue& v);

/// One-letter workbook-json tag: n s b d f e.
char type_tag(const CellValue& v);

/// Diagnostic form such as `Number 2` or `Text "2"`.
std::string describe(const CellValue& v);

/// Typed comparison for predicates. Empty optional when the types differ
/// (or either side is Empty); Bool orders false < true, Dates chronologically,
/// Text bytewise.
std::optional<std::strong_ordering> compare_same_type(const CellValue& a, const CellValue& b);

/// Total order used by SORT over non-empty values: Number < Date < Text <
/// Formula < Bool, then within type as compare_same_type.
std::strong_ordering sort_order(const CellValue& a, const CellValue& b);

}  // namespace sheetmind
