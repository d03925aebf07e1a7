#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sheetmind/workbook.hpp"

namespace sheetmind {

enum class WorkbookFormat { csv, json };

/// RFC 4180 CSV into a single sheet named "Sheet1", typing each field with
/// infer_cell. Throws ParseError on malformed quoting.
Workbook load_csv(std::string_view content);

/// The active sheet as CSV over its used extent, CRLF-free ("\n" rows).
std::string save_csv(const Workbook& wb);

/// workbook-json:
///   {"sheets": [{"name": str, "cells": {"A1": {"t": "n|s|b|d|f|e", "v": ...}}}],
///    "active": int}
/// Cells are written row by row; save(load(save(wb))) is byte-identical.
nlohmann::ordered_json workbook_to_json(const Workbook& wb);

/// {"t": tag, "v": value}; `where` names the cell in error messages.
nlohmann::ordered_json cell_to_json(const CellValue& v);
CellValue cell_from_json(const nlohmann::ordered_json& cell, const std::string& where);

/// {"cells": [{"sheet", "addr", "before", "after"}], "structural": [...],
///  "sheets": [...], "active_after": int|null}
nlohmann::ordered_json diff_to_json(const SheetDiff& d);
SheetDiff diff_from_json(const nlohmann::ordered_json& j);
Workbook workbook_from_json(const nlohmann::ordered_json& j);

Workbook load_workbook(std::string_view content, WorkbookFormat format);
std::string save_workbook(const Workbook& wb, WorkbookFormat format);

/// Chooses the format from the file extension (".csv" or anything else).
WorkbookFormat format_for_path(std::string_view path);
Workbook read_workbook_file(const std::string& path);
void write_workbook_file(const Workbook& wb, const std::string& path);

/// Hex SHA-256 of the workbook-json text; stable across runs.
std::string workbook_hash(const Workbook& wb);

}  // namespace sheetmind
