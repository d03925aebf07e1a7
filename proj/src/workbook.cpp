#include "sheetmind/workbook.hpp"

#include <algorithm>

#include "sheetmind/error.hpp"

namespace sheetmind {

namespace {

const CellValue kEmpty = Empty{};

void check_bounds(CellAddress a) {
    if (a.row < 1 || a.col < 1 || a.row > kMaxRows || a.col > kMaxCols) {
        throw BoundsError("address " + format_address(a) + " outside the " + std::to_string(kMaxRows) +
                          "x" + std::to_string(kMaxCols) + " grid");
    }
}

template <typename Shift>
CellMap remap(const CellMap& cells, Shift shift) {
    CellMap out;
    for (const auto& [addr, value] : cells) {
        if (auto moved = shift(addr)) out.emplace(*moved, value);
    }
    return out;
}

using Line = std::vector<std::pair<std::uint32_t, CellValue>>;

// Rows (or columns, when `by_col`) 1..n as vectors of (other index, value).
std::vector<Line> lines(const Sheet& s, std::uint32_t n, bool by_col) {
    std::vector<Line> out(n);
    for (const auto& [addr, value] : s.cells()) {
        std::uint32_t major = by_col ? addr.col : addr.row;
        std::uint32_t minor = by_col ? addr.row : addr.col;
        if (major <= n) out[major - 1].emplace_back(minor, value);
    }
    if (by_col) {
        for (auto& l : out) std::sort(l.begin(), l.end(), [](auto& a, auto& b) { return a.first < b.first; });
    }
    return out;
}

// Runs of `longer` not matched when greedily embedding `shorter` into it, as
// (1-based start, length). Empty optional when `shorter` is not a
// subsequence, or when `require_empty` and an unmatched line has content.
std::optional<std::vector<std::pair<std::uint32_t, std::uint32_t>>> unmatched_runs(
    const std::vector<Line>& longer, const std::vector<Line>& shorter, bool require_empty) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> runs;
    std::size_t j = 0;
    for (std::size_t i = 0; i < longer.size(); ++i) {
        if (j < shorter.size() && longer[i] == shorter[j]) {
            ++j;
            continue;
        }
        if (require_empty && !longer[i].empty()) return std::nullopt;
        auto idx = static_cast<std::uint32_t>(i + 1);
        if (!runs.empty() && runs.back().first + runs.back().second == idx) {
            ++runs.back().second;
        } else {
            runs.emplace_back(idx, 1);
        }
    }
    if (j != shorter.size()) return std::nullopt;
    return runs;
}

void detect_structural(const Sheet& b, const Sheet& a, std::vector<StructuralChange>& out) {
    auto try_axis = [&](bool by_col) {
        std::uint32_t n = by_col ? b.used_cols() : b.used_rows();
        std::uint32_t m = by_col ? a.used_cols() : a.used_rows();
        if (n == m) return false;
        auto lb = lines(b, n, by_col);
        auto la = lines(a, m, by_col);
        // Deleted lines may hold anything; inserted ones start out empty.
        auto runs = n > m ? unmatched_runs(lb, la, false) : unmatched_runs(la, lb, true);
        if (!runs) return false;
        StructuralKind kind = by_col ? (n > m ? StructuralKind::cols_deleted : StructuralKind::cols_inserted)
                                     : (n > m ? StructuralKind::rows_deleted : StructuralKind::rows_inserted);
        for (auto [at, count] : *runs) out.push_back({a.name(), kind, at, count});
        return true;
    };
    if (!try_axis(false)) try_axis(true);
}

void diff_cells(const Sheet& b, const Sheet& a, std::vector<CellChange>& out) {
    auto ib = b.cells().begin(), eb = b.cells().end();
    auto ia = a.cells().begin(), ea = a.cells().end();
    RowMajor less;
    while (ib != eb || ia != ea) {
        if (ia == ea || (ib != eb && less(ib->first, ia->first))) {
            out.push_back({a.name(), ib->first, ib->second, Empty{}});
            ++ib;
        } else if (ib == eb || less(ia->first, ib->first)) {
            out.push_back({a.name(), ia->first, Empty{}, ia->second});
            ++ia;
        } else {
            if (ib->second != ia->second) out.push_back({a.name(), ib->first, ib->second, ia->second});
            ++ib;
            ++ia;
        }
    }
}

// Longest common subsequence of sheet names (exact match), as index pairs.
std::vector<std::pair<std::size_t, std::size_t>> common_sheets(const Workbook& b, const Workbook& a) {
    const auto& sb = b.sheets();
    const auto& sa = a.sheets();
    std::vector<std::vector<std::size_t>> len(sb.size() + 1, std::vector<std::size_t>(sa.size() + 1, 0));
    for (std::size_t i = sb.size(); i-- > 0;)
        for (std::size_t j = sa.size(); j-- > 0;)
            len[i][j] = sb[i].name() == sa[j].name() ? len[i + 1][j + 1] + 1
                                                     : std::max(len[i + 1][j], len[i][j + 1]);
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t i = 0, j = 0;
    while (i < sb.size() && j < sa.size()) {
        if (sb[i].name() == sa[j].name()) {
            out.emplace_back(i++, j++);
        } else if (len[i + 1][j] >= len[i][j + 1]) {
            ++i;
        } else {
            ++j;
        }
    }
    return out;
}

}  // namespace

Sheet::Sheet(std::string name) : name_(std::move(name)) {
    if (!is_valid_sheet_name(name_)) throw Error("invalid sheet name '" + name_ + "'");
}

const CellValue& Sheet::get(CellAddress a) const {
    auto it = cells_.find(a);
    return it == cells_.end() ? kEmpty : it->second;
}

void Sheet::set(CellAddress a, CellValue v) {
    check_bounds(a);
    v = normalize_entered(std::move(v));
    if (is_empty(v)) {
        cells_.erase(a);
    } else {
        cells_.insert_or_assign(a, std::move(v));
    }
}

std::uint32_t Sheet::used_rows() const { return cells_.empty() ? 0 : cells_.rbegin()->first.row; }

std::uint32_t Sheet::used_cols() const {
    std::uint32_t out = 0;
    for (const auto& entry : cells_) out = std::max(out, entry.first.col);
    return out;
}

void Sheet::insert_rows(std::uint32_t at, std::uint32_t count) {
    if (at < 1 || at > kMaxRows) throw BoundsError("row " + std::to_string(at) + " outside the grid");
    if (count == 0) return;
    std::uint32_t used = used_rows();
    if (used >= at && static_cast<std::uint64_t>(used) + count > kMaxRows) {
        throw BoundsError("inserting " + std::to_string(count) + " rows would push data past row " +
                          std::to_string(kMaxRows));
    }
    cells_ = remap(cells_, [&](CellAddress a) -> std::optional<CellAddress> {
        if (a.row >= at) a.row += count;
        return a;
    });
}

void Sheet::delete_rows(std::uint32_t at, std::uint32_t count) {
    if (at < 1) throw BoundsError("row 0 does not exist");
    cells_ = remap(cells_, [&](CellAddress a) -> std::optional<CellAddress> {
        if (a.row < at) return a;
        if (a.row - at < count) return std::nullopt;
        a.row -= count;
        return a;
    });
}

void Sheet::insert_cols(std::uint32_t at, std::uint32_t count) {
    if (at < 1 || at > kMaxCols) throw BoundsError("column " + std::to_string(at) + " outside the grid");
    if (count == 0) return;
    std::uint32_t used = used_cols();
    if (used >= at && static_cast<std::uint64_t>(used) + count > kMaxCols) {
        throw BoundsError("inserting " + std::to_string(count) + " columns would push data past column " +
                          column_letters(kMaxCols));
    }
    cells_ = remap(cells_, [&](CellAddress a) -> std::optional<CellAddress> {
        if (a.col >= at) a.col += count;
        return a;
    });
}

void Sheet::delete_cols(std::uint32_t at, std::uint32_t count) {
    if (at < 1) throw BoundsError("column 0 does not exist");
    cells_ = remap(cells_, [&](CellAddress a) -> std::optional<CellAddress> {
        if (a.col < at) return a;
        if (a.col - at < count) return std::nullopt;
        a.col -= count;
        return a;
    });
}

Workbook::Workbook() { sheets_.emplace_back("Sheet1"); }

Workbook::Workbook(std::vector<Sheet> sheets, std::size_t active) : sheets_(std::move(sheets)), active_(active) {
    if (sheets_.empty()) throw Error("a workbook needs at least one sheet");
    for (std::size_t i = 0; i < sheets_.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (iequals(sheets_[i].name(), sheets_[j].name()))
                throw Error("duplicate sheet name '" + sheets_[i].name() + "'");
    if (active_ >= sheets_.size()) throw Error("active sheet index out of range");
}

void Workbook::set_active(std::size_t index) {
    if (index >= sheets_.size()) throw Error("active sheet index out of range");
    active_ = index;
}

std::optional<std::size_t> Workbook::index_of(std::string_view name) const {
    for (std::size_t i = 0; i < sheets_.size(); ++i)
        if (iequals(sheets_[i].name(), name)) return i;
    return std::nullopt;
}

const Sheet* Workbook::find(std::string_view name) const {
    auto i = index_of(name);
    return i ? &sheets_[*i] : nullptr;
}

Sheet* Workbook::find(std::string_view name) {
    auto i = index_of(name);
    return i ? &sheets_[*i] : nullptr;
}

const Sheet& Workbook::sheet(std::string_view name) const {
    if (const Sheet* s = find(name)) return *s;
    throw UnknownSheetError(std::string(name));
}

Sheet& Workbook::sheet(std::string_view name) {
    if (Sheet* s = find(name)) return *s;
    throw UnknownSheetError(std::string(name));
}

const Sheet& Workbook::sheet_for(const std::optional<std::string>& name) const {
    return name ? sheet(*name) : active_sheet();
}

Sheet& Workbook::sheet_for(const std::optional<std::string>& name) {
    return name ? sheet(*name) : active_sheet();
}

Sheet& Workbook::add_sheet(std::string name, std::optional<std::size_t> at) {
    if (find(name)) throw Error("duplicate sheet name '" + name + "'");
    std::size_t pos = at.value_or(sheets_.size());
    if (pos > sheets_.size()) throw Error("sheet position out of range");
    sheets_.insert(sheets_.begin() + static_cast<std::ptrdiff_t>(pos), Sheet(std::move(name)));
    if (pos <= active_ && sheets_.size() > 1) ++active_;
    return sheets_[pos];
}

void Workbook::remove_sheet(std::string_view name) {
    auto i = index_of(name);
    if (!i) throw UnknownSheetError(std::string(name));
    if (sheets_.size() == 1) throw Error("cannot remove the last sheet");
    sheets_.erase(sheets_.begin() + static_cast<std::ptrdiff_t>(*i));
    if (active_ > *i || active_ >= sheets_.size()) --active_;
}

CellValue get_cell(const Workbook& wb, std::string_view sheet, CellAddress addr) {
    return wb.sheet(sheet).get(addr);
}

void set_cell(Workbook& wb, std::string_view sheet, CellAddress addr, CellValue v) {
    wb.sheet(sheet).set(addr, std::move(v));
}

SheetSnapshot snapshot(Workbook& wb) {
    ++wb.version_;
    return SheetSnapshot{std::make_shared<const Workbook>(wb), wb.version_};
}

std::string_view to_string(StructuralKind k) {
    switch (k) {
        case StructuralKind::rows_inserted: return "rows_inserted";
        case StructuralKind::rows_deleted: return "rows_deleted";
        case StructuralKind::cols_inserted: return "cols_inserted";
        case StructuralKind::cols_deleted: return "cols_deleted";
    }
    return "?";
}

std::string_view to_string(SheetChangeKind k) {
    return k == SheetChangeKind::sheet_added ? "sheet_added" : "sheet_removed";
}

SheetDiff diff(const Workbook& before, const Workbook& after) {
    SheetDiff d;
    auto common = common_sheets(before, after);
    std::vector<bool> kept_before(before.sheets().size()), kept_after(after.sheets().size());
    for (auto [i, j] : common) kept_before[i] = kept_after[j] = true;

    for (std::size_t i = 0; i < before.sheets().size(); ++i)
        if (!kept_before[i]) d.sheet_changes.push_back({SheetChangeKind::sheet_removed, before.sheets()[i].name(), i});
    for (std::size_t j = 0; j < after.sheets().size(); ++j)
        if (!kept_after[j]) d.sheet_changes.push_back({SheetChangeKind::sheet_added, after.sheets()[j].name(), j});

    for (std::size_t j = 0; j < after.sheets().size(); ++j) {
        const Sheet& a = after.sheets()[j];
        if (kept_after[j]) continue;
        for (const auto& [addr, value] : a.cells()) d.cell_changes.push_back({a.name(), addr, Empty{}, value});
    }
    for (auto [i, j] : common) {
        const Sheet& b = before.sheets()[i];
        const Sheet& a = after.sheets()[j];
        diff_cells(b, a, d.cell_changes);
        detect_structural(b, a, d.structural_changes);
    }
    if (before.active_index() != after.active_index()) d.active_after = after.active_index();
    return d;
}

SheetDiff diff(const SheetSnapshot& before, const SheetSnapshot& after) {
    return diff(before.workbook(), after.workbook());
}

Workbook apply_diff(const Workbook& before, const SheetDiff& d) {
    std::vector<Sheet> sheets = before.sheets();
    auto locate = [&](std::string_view name) -> Sheet* {
        for (auto& s : sheets)
            if (s.name() == name) return &s;
        return nullptr;
    };

    for (const auto& change : d.sheet_changes) {
        if (change.kind != SheetChangeKind::sheet_removed) continue;
        auto it = std::find_if(sheets.begin(), sheets.end(), [&](const Sheet& s) { return s.name() == change.name; });
        if (it == sheets.end()) throw DiffMismatchError("diff removes unknown sheet '" + change.name + "'");
        sheets.erase(it);
    }
    std::vector<const SheetChange*> added;
    for (const auto& change : d.sheet_changes)
        if (change.kind == SheetChangeKind::sheet_added) added.push_back(&change);
    std::sort(added.begin(), added.end(), [](auto* a, auto* b) { return a->index < b->index; });
    for (const auto* change : added) {
        if (change->index > sheets.size()) throw DiffMismatchError("diff adds sheet past the end");
        sheets.insert(sheets.begin() + static_cast<std::ptrdiff_t>(change->index), Sheet(change->name));
    }

    for (const auto& c : d.cell_changes) {
        Sheet* s = locate(c.sheet);
        if (!s) throw DiffMismatchError("diff references unknown sheet '" + c.sheet + "'");
        if (s->get(c.addr) != c.before) {
            throw DiffMismatchError("diff expects " + describe(c.before) + " at " + c.sheet + "!" +
                                    format_address(c.addr) + " but found " + describe(s->get(c.addr)));
        }
        s->set(c.addr, c.after);
    }

    std::size_t active = d.active_after.value_or(before.active_index());
    if (!sheets.empty() && active >= sheets.size()) active = sheets.size() - 1;
    try {
        return Workbook(std::move(sheets), active);
    } catch (const Error& e) {
        throw DiffMismatchError(std::string("diff produces an invalid workbook: ") + e.what());
    }
}

Workbook apply_diff(const SheetSnapshot& before, const SheetDiff& d) { return apply_diff(before.workbook(), d); }

}  // namespace sheetmind
