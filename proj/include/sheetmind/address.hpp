#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sheetmind {

/// Largest grid a sheet may occupy.
inline constexpr std::uint32_t kMaxRows = 10'000;
inline constexpr std::uint32_t kMaxCols = 1'000;

/// Largest address accepted by the A1 parser (Excel's XFD1048576). Anything
/// past kMaxRows/kMaxCols parses but fails validation.
inline constexpr std::uint32_t kParseMaxRows = 1'048'576;
inline constexpr std::uint32_t kParseMaxCols = 16'384;

struct CellAddress {
    std::uint32_t col = 1;  // 1-based
    std::uint32_t row = 1;  // 1-based

    friend auto operator<=>(const CellAddress&, const CellAddress&) = default;
};

struct Range {
    std::optional<std::string> sheet;
    CellAddress top_left;
    /// For open_bottom ranges only `col` is meaningful.
    CellAddress bottom_right;
    bool open_bottom = false;

    std::uint32_t width() const { return bottom_right.col - top_left.col + 1; }
    bool is_single_cell() const { return !open_bottom && top_left == bottom_right; }

    friend bool operator==(const Range&, const Range&) = default;
};

/// "A" -> 1, "E" -> 5, "AA" -> 27. Empty optional for anything that is not
/// one to three uppercase letters within kParseMaxCols.
std::optional<std::uint32_t> column_from_letters(std::string_view letters);
std::string column_letters(std::uint32_t col);

std::string format_address(CellAddress a);

/// Parses a whole string as a range; throws ParseError naming the offending
/// token otherwise.
Range parse_range(std::string_view text);

/// Scans a range starting at `pos`, advancing it past the consumed text.
/// Used by the action parser, which embeds ranges inside larger input.
Range scan_range(std::string_view text, std::size_t& pos);

std::string format_range(const Range& r);

/// Sheet names that can be written without quotes: [A-Za-z_][A-Za-z0-9_]*.
bool is_bare_sheet_name(std::string_view name);

/// Nonempty and free of '!' and ':'.
bool is_valid_sheet_name(std::string_view name);

/// ASCII case-insensitive equality used for sheet names.
bool iequals(std::string_view a, std::string_view b);

}  // namespace sheetmind
