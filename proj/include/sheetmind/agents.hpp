#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetmind/action.hpp"
#include "sheetmind/backend.hpp"
#include "sheetmind/context.hpp"
#include "sheetmind/exec.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind {

struct Subtask {
    int index = 1;
    std::string description;
    /// Strictly smaller indices.
    std::vector<int> depends_on;
    friend bool operator==(const Subtask&, const Subtask&) = default;
};

struct Plan {
    std::vector<Subtask> subtasks;
    std::string raw;
};

class PlanningFailure : public Error {
public:
    using Error::Error;
};

class GenerationFailure : public Error {
public:
    using Error::Error;
};

/// Parses "N. text [after K, M]" lines; other lines are ignored. Indices must
/// run 1, 2, ... and dependencies must point backwards. Throws ParseError.
Plan parse_plan(std::string_view reply);

/// Asks the manager for a plan, reprompting once on an unparseable reply.
/// `notes` is extra guidance placed before the instruction (used for
/// reformulation). Throws PlanningFailure or BackendError.
Plan manager_plan(const std::string& instruction, const SheetContext& ctx, ChatBackend& backend,
                  const std::string& notes = {});

/// First line of `reply` that parses as an action, after stripping code
/// fences, backticks and surrounding whitespace. On failure `first_error`
/// receives the parse error of the first candidate line.
std::optional<Action> extract_action(std::string_view reply, std::string* first_error = nullptr);

struct Generation {
    Action action;
    std::string reply;
    /// Backend calls spent, 1 to 3.
    int calls = 1;
};

/// Asks the action agent for one action; up to two reprompts carrying the
/// parse error. Throws GenerationFailure or BackendError.
Generation action_generate(const Subtask& t, const SheetContext& ctx, const std::optional<std::string>& feedback,
                           ChatBackend& backend);

/// "VALID" or "INVALID[: reason]" on the first non-blank line, any case.
/// nullopt when the reply does not start with either keyword.
std::optional<Verdict> parse_judge_pre(std::string_view reply);

/// Static checks first; the judge is asked only when they pass. An
/// unparseable judge reply is retried once, then counts as invalid.
Verdict reflect_pre(const Subtask& t, const Action& a, const Workbook& wb, ChatBackend& backend);

struct PostVerdict {
    enum class Kind { ok, retry, escalate };
    Kind kind = Kind::ok;
    std::string text;

    static PostVerdict ok() { return {}; }
    static PostVerdict retry(std::string feedback) { return {Kind::retry, std::move(feedback)}; }
    static PostVerdict escalate(std::string reason) { return {Kind::escalate, std::move(reason)}; }
    friend bool operator==(const PostVerdict&, const PostVerdict&) = default;
};

std::string_view to_string(PostVerdict::Kind k);

/// "OK", "RETRY: feedback" or "ESCALATE: reason" on the first non-blank line.
std::optional<PostVerdict> parse_judge_post(std::string_view reply);

/// True for verbs expected to change the workbook (everything but SELECT).
bool is_mutating(Verb v);

inline constexpr std::string_view kNoChangeFeedback = "no change detected";
inline constexpr std::string_view kJudgeUnparseable = "judge-unparseable";

/// A mutating action with an empty diff is sent back without asking the
/// judge; otherwise the judge sees the subtask, the action and the effect.
PostVerdict reflect_post(const Subtask& t, const Action& a, const SheetSnapshot& before, const SheetSnapshot& after,
                         const ExecutionResult& result, ChatBackend& backend);

/// Readable account of a diff (and selection, if any) for the post judge.
std::string describe_effect(const SheetDiff& d, const std::optional<std::vector<SelectedCell>>& selection);

/// Clauses such as "cleared 2 cells in E" for one diff.
std::vector<std::string> summary_clauses(const SheetDiff& d);

/// Template summary of all diffs. With a backend, a rephrased version is
/// used only if it keeps exactly the template's numbers.
std::string summarize(const std::vector<SheetDiff>& diffs, ChatBackend* polish = nullptr);

/// All maximal digit runs in `text`, sorted.
std::vector<std::string> numbers_in(std::string_view text);

}  // namespace sheetmind
