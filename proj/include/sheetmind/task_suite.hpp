#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetmind/backend.hpp"
#include "sheetmind/session.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind {

enum class TaskCategory { single_step, multi_step };

std::string_view to_string(TaskCategory c);

/// One benchmark task, read from a *.task.yaml file:
///
///   id: t01
///   category: single_step | multi_step
///   family: cleanup
///   description: the instruction text
///   initial: fixtures/t01.csv      # or .json, or an inline workbook-json string
///   expected: fixtures/t01.expected.csv
///   script:                        # optional
///     - {agent: manager, match: Decompose, reply: "1. ..."}
struct TaskSpec {
    std::string id;
    TaskCategory category = TaskCategory::single_step;
    std::string family;
    std::string description;
    Workbook initial;
    Workbook expected;
    std::optional<BackendScript> script;
};

/// Throws ParseError (malformed task) or Error (unreadable fixture).
TaskSpec load_task(const std::filesystem::path& file);
/// Every *.task.yaml in `dir`, ordered by file name.
std::vector<TaskSpec> load_suite(const std::filesystem::path& dir);

struct CheckResult {
    bool pass = true;
    /// At most ten entries such as `Sheet1!E1: expected Empty, got Text "9am"`.
    std::vector<std::string> differences;

    std::string detail() const;
};

/// Sheet order and typed cell values must agree; sheet names compare
/// case-insensitively; the active sheet is ignored.
CheckResult check_task(const Workbook& expected, const Workbook& actual);

/// Drops entries for agents the configuration turns off (manager entries
/// without the manager, judge entries without reflection).
BackendScript project_script(const BackendScript& script, const PipelineConfig& config);

}  // namespace sheetmind
