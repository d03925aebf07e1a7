#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sheetmind/action.hpp"
#include "sheetmind/error.hpp"
#include "sheetmind/regex_dialect.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind {

// Verb semantics
// --------------
// Unqualified ranges refer to the active sheet. Open-bottom ranges (E:E,
// E2:E) end at the sheet's last used row at execution time. WHERE is
// evaluated per cell against that cell's current value.
//
//   SELECT       reports matching cells; never mutates.
//   SET          writes the literal into matching cells ("=..." text becomes
//                a formula, "" clears).
//   DELETE       clears matching cells; rows and columns stay in place.
//   DELETE_ROWS  removes whole rows whose cell in the (single) column
//                matches, bottom-up so indices stay valid.
//   INSERT_ROWS  inserts `count` (default 1) empty rows before row `at` of
//                the active sheet. INSERT_COLS likewise for columns.
//   DELETE_COLS  removes every column spanned by the range.
//   SORT         stable sort of the rectangle's rows by the key column;
//                Empty keys go last in either order.
//   COPY         writes the source block (Empty included) at the
//                destination cell; same-sheet overlap is an error.
//   AGGREGATE    SUM/AVG/MIN/MAX over Number cells, COUNT over non-Empty
//                cells, among cells matching WHERE. AVG/MIN/MAX of no
//                numbers write Empty; SUM of none writes 0.

class ExecutionError : public Error {
public:
    using Error::Error;
};

struct SelectedCell {
    std::string sheet;
    CellAddress addr;
    CellValue value;
    friend bool operator==(const SelectedCell&, const SelectedCell&) = default;
};

struct ExecutionResult {
    SheetDiff diff;
    /// Present for SELECT only.
    std::optional<std::vector<SelectedCell>> selection;
    bool mutated = false;

    friend bool operator==(const ExecutionResult&, const ExecutionResult&) = default;
};

/// Evaluates conditions, compiling each MATCHES pattern once.
class ConditionEvaluator {
public:
    bool operator()(const Condition& c, const CellValue& v);

private:
    std::map<std::string, std::optional<Pattern>, std::less<>> patterns_;
};

/// Total: type-mismatched comparisons and uncompilable patterns are false.
bool eval_condition(const Condition& c, const CellValue& v);

/// Applies `a` in place. Throws SemanticViolation when validate_static
/// rejects the action, BoundsError/ExecutionError when it cannot be carried
/// out; the workbook is left unchanged in both cases.
ExecutionResult execute(Workbook& wb, const Action& a);

struct ScriptExecution {
    std::vector<ExecutionResult> results;
    std::optional<std::size_t> failed_index;
    std::string error;

    bool ok() const { return !failed_index; }
};

/// Runs actions in order and stops at the first failure.
ScriptExecution execute_script(Workbook& wb, const std::vector<Action>& actions);

}  // namespace sheetmind
