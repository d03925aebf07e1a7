#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sheetmind/backend.hpp"
#include "sheetmind/session.hpp"

namespace sheetmind {

struct InstructionOutcome {
    enum class Status { success, partial, failure };

    Status status = Status::failure;
    /// Canonical text of each executed action, in order.
    std::vector<std::string> executed_actions;
    std::string summary;
    std::optional<std::string> failure_reason;

    friend bool operator==(const InstructionOutcome&, const InstructionOutcome&) = default;
};

std::string_view to_string(InstructionOutcome::Status s);

/// {"status", "executed_actions", "summary", "failure_reason"}
nlohmann::ordered_json outcome_to_json(const InstructionOutcome& o);

/// Runs one instruction through plan, generate, check, execute and review,
/// recording every step in the session transcript and committing each
/// executed action to the session workbook. Executed effects are kept when
/// later steps fail. Waits for earlier instructions on the same session.
InstructionOutcome run_instruction(Session& session, const std::string& text, ChatBackend& backend);

}  // namespace sheetmind
