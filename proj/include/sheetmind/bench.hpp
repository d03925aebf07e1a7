#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheetmind/backend.hpp"
#include "sheetmind/task_suite.hpp"

namespace sheetmind {

struct TaskResult {
    std::string id;
    TaskCategory category = TaskCategory::single_step;
    std::string family;
    bool pass = false;
    /// Outcome status of the instruction (success, partial, failure).
    std::string status;
    /// Why the task failed; empty on pass.
    std::string reason;
    /// Backend calls made (scripted runs only).
    std::size_t backend_calls = 0;
    /// Transcript JSONL, when requested.
    std::string transcript;
};

struct ConfigReport {
    std::string label;
    std::vector<TaskResult> tasks;

    std::size_t passes() const;
    std::size_t passes(TaskCategory c) const;
    std::size_t total(TaskCategory c) const;
};

struct BenchReport {
    std::string suite;
    std::vector<ConfigReport> configs;
    double wall_seconds = 0;

    const ConfigReport* find(const std::string& label) const;
    nlohmann::ordered_json to_json() const;
    /// Fixed-width table of pass counts and rates per configuration.
    std::string table() const;
};

struct BenchOptions {
    /// Ablation labels to run, in report order.
    std::vector<std::string> configs = {"full"};
    /// Tasks run concurrently; sessions are independent.
    unsigned jobs = 1;
    /// Normalize transcript timestamps.
    bool test_mode = true;
    bool keep_transcripts = false;
    /// When set, every task talks to this live backend instead of its script.
    std::optional<BackendConfig> live;
    std::string suite_name;
};

/// Runs every task under every configuration on a fresh session. A task
/// passes when the final workbook matches its expected workbook. Throws
/// Error before running anything when a scripted task has no script or a
/// label is unknown.
BenchReport run_bench(const std::vector<TaskSpec>& suite, const BenchOptions& options);

}  // namespace sheetmind
