#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sheetmind/workbook.hpp"

namespace sheetmind {

inline constexpr std::uint32_t kSampleRows = 20;
inline constexpr std::uint32_t kSampleCols = 26;
inline constexpr std::size_t kSampleTextLimit = 256;
inline constexpr std::string_view kTruncationMarker = "[...]";

struct SheetExtent {
    std::string name;
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    friend bool operator==(const SheetExtent&, const SheetExtent&) = default;
};

struct SampledCell {
    CellAddress addr;
    char type = 'e';
    /// Rendered value, at most kSampleTextLimit bytes including the marker.
    std::string text;
    friend bool operator==(const SampledCell&, const SampledCell&) = default;
};

/// What the agents are told about the workbook.
struct SheetContext {
    std::vector<SheetExtent> sheets;
    std::size_t active = 0;
    /// Non-empty cells of the active sheet within the first 20 rows x 26 columns.
    std::vector<SampledCell> sample;
    /// Cell count per type name (text, number, ...) across all sheets.
    std::map<std::string, std::size_t> histogram;

    std::string render() const;
};

SheetContext extract_context(const Workbook& wb);

/// Cuts `text` to at most `limit` bytes, ending with kTruncationMarker when
/// cut. Never splits a UTF-8 sequence.
std::string truncate_text(const std::string& text, std::size_t limit = kSampleTextLimit);

std::string_view type_name(char tag);

}  // namespace sheetmind
