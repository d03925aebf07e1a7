#pragma once

#include "sheetmind/action.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind {

/// The machine-checkable half of pre-execution validation. Valid iff the
/// verb is known, arguments fit its signature, every referenced sheet
/// exists, closed ranges lie inside the grid, MATCHES patterns compile in
/// the supported dialect, a SORT key lies inside its range, DELETE_ROWS
/// names a single column, and COPY/AGGREGATE destinations are single cells.
/// Pure: depends only on its arguments.
Verdict validate_static(const Action& a, const Workbook& wb);

}  // namespace sheetmind
