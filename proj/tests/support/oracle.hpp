#pragma once

#include <vector>

#include "sheetmind/action.hpp"
#include "sheetmind/exec.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind::testkit {

/// Reference interpreter over dense grids, written straight from the verb
/// table without reusing the engine's helpers.
struct OracleResult {
    bool error = false;
    Workbook wb;
    std::vector<SelectedCell> selection;
};

OracleResult oracle_execute(const Workbook& wb, const Action& a);
bool oracle_condition(const Condition& c, const CellValue& v);

/// Every cell difference between two workbooks with identical sheet lists,
/// found by scanning a dense box covering both.
std::vector<CellChange> dense_cell_changes(const Workbook& before, const Workbook& after);

}  // namespace sheetmind::testkit
