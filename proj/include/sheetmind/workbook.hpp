#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetmind/address.hpp"
#include "sheetmind/cell.hpp"

namespace sheetmind {

/// Orders addresses row by row, which is the order cells are serialized in.
struct RowMajor {
    bool operator()(const CellAddress& a, const CellAddress& b) const {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    }
};

using CellMap = std::map<CellAddress, CellValue, RowMajor>;

struct SheetSnapshot;

/// A sparse grid. Stored cells are never Empty.
class Sheet {
public:
    explicit Sheet(std::string name);

    const std::string& name() const { return name_; }
    const CellMap& cells() const { return cells_; }

    const CellValue& get(CellAddress a) const;
    /// Writes a normalized value; Empty erases. Throws BoundsError outside
    /// the kMaxRows x kMaxCols grid.
    void set(CellAddress a, CellValue v);

    std::uint32_t used_rows() const;
    std::uint32_t used_cols() const;

    /// Row/column surgery; cells at or after `at` shift. Throws BoundsError
    /// when a shifted cell would leave the grid.
    void insert_rows(std::uint32_t at, std::uint32_t count);
    void delete_rows(std::uint32_t at, std::uint32_t count);
    void insert_cols(std::uint32_t at, std::uint32_t count);
    void delete_cols(std::uint32_t at, std::uint32_t count);

    friend bool operator==(const Sheet&, const Sheet&) = default;

private:
    std::string name_;
    CellMap cells_;
};

/// Ordered sheets with case-insensitively unique names and an active index.
/// Single writer: callers serialize mutation.
class Workbook {
public:
    /// One empty sheet named "Sheet1".
    Workbook();
    explicit Workbook(std::vector<Sheet> sheets, std::size_t active = 0);

    const std::vector<Sheet>& sheets() const { return sheets_; }
    std::size_t active_index() const { return active_; }
    void set_active(std::size_t index);

    const Sheet& active_sheet() const { return sheets_[active_]; }
    Sheet& active_sheet() { return sheets_[active_]; }

    /// Case-insensitive lookup; nullptr when absent.
    const Sheet* find(std::string_view name) const;
    Sheet* find(std::string_view name);
    std::optional<std::size_t> index_of(std::string_view name) const;

    /// Throws UnknownSheetError.
    const Sheet& sheet(std::string_view name) const;
    Sheet& sheet(std::string_view name);

    /// Resolves an optional sheet qualifier against the active sheet.
    const Sheet& sheet_for(const std::optional<std::string>& name) const;
    Sheet& sheet_for(const std::optional<std::string>& name);

    Sheet& add_sheet(std::string name, std::optional<std::size_t> at = std::nullopt);
    void remove_sheet(std::string_view name);

    /// Snapshot counter; bumped by snapshot(). Not part of structural equality.
    std::uint64_t version() const { return version_; }

    friend bool operator==(const Workbook& a, const Workbook& b) {
        return a.active_ == b.active_ && a.sheets_ == b.sheets_;
    }

private:
    friend SheetSnapshot snapshot(Workbook& wb);

    std::vector<Sheet> sheets_;
    std::size_t active_ = 0;
    std::uint64_t version_ = 0;
};

CellValue get_cell(const Workbook& wb, std::string_view sheet, CellAddress addr);
void set_cell(Workbook& wb, std::string_view sheet, CellAddress addr, CellValue v);

/// Immutable copy of a workbook tagged with the workbook's next version.
struct SheetSnapshot {
    std::shared_ptr<const Workbook> state;
    std::uint64_t version = 0;

    const Workbook& workbook() const { return *state; }
};

SheetSnapshot snapshot(Workbook& wb);

enum class StructuralKind { rows_inserted, rows_deleted, cols_inserted, cols_deleted };
enum class SheetChangeKind { sheet_added, sheet_removed };

std::string_view to_string(StructuralKind k);
std::string_view to_string(SheetChangeKind k);

struct CellChange {
    std::string sheet;
    CellAddress addr;
    CellValue before;
    CellValue after;
    friend bool operator==(const CellChange&, const CellChange&) = default;
};

/// Row/column insertions and deletions recognised between two states.
/// Indices for deletions refer to the earlier state, insertions to the later.
/// They annotate the cell changes; apply_diff does not replay them.
struct StructuralChange {
    std::string sheet;
    StructuralKind kind;
    std::uint32_t at = 0;
    std::uint32_t count = 0;
    friend bool operator==(const StructuralChange&, const StructuralChange&) = default;
};

struct SheetChange {
    SheetChangeKind kind;
    std::string name;
    /// Position in the later workbook for additions, earlier for removals.
    std::size_t index = 0;
    friend bool operator==(const SheetChange&, const SheetChange&) = default;
};

/// Delta between two workbook states. Cell changes compare the same address
/// in both states, so a deleted row shows up as every shifted cell changing.
/// Cells of added sheets appear as Empty -> value changes.
struct SheetDiff {
    std::vector<CellChange> cell_changes;
    std::vector<StructuralChange> structural_changes;
    std::vector<SheetChange> sheet_changes;
    std::optional<std::size_t> active_after;

    bool empty() const {
        return cell_changes.empty() && structural_changes.empty() && sheet_changes.empty() &&
               !active_after;
    }

    friend bool operator==(const SheetDiff&, const SheetDiff&) = default;
};

SheetDiff diff(const Workbook& before, const Workbook& after);
SheetDiff diff(const SheetSnapshot& before, const SheetSnapshot& after);

/// Replays `d` on top of `before`. Throws DiffMismatchError when the diff
/// names a missing sheet or its `before` values disagree with the base.
Workbook apply_diff(const Workbook& before, const SheetDiff& d);
Workbook apply_diff(const SheetSnapshot& before, const SheetDiff& d);

}  // namespace sheetmind
