#include "sheetmind/orchestrator.hpp"

#include <map>

#include "sheetmind/agents.hpp"
#include "sheetmind/context.hpp"
#include "sheetmind/exec.hpp"
#include "sheetmind/grammar.hpp"
#include "sheetmind/validate.hpp"
#include "sheetmind/workbook_io.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

std::string_view to_string(InstructionOutcome::Status s) {
    switch (s) {
        case InstructionOutcome::Status::success: return "success";
        case InstructionOutcome::Status::partial: return "partial";
        case InstructionOutcome::Status::failure: return "failure";
    }
    return "?";
}

ojson outcome_to_json(const InstructionOutcome& o) {
    return {{"status", std::string(to_string(o.status))},
            {"executed_actions", o.executed_actions},
            {"summary", o.summary},
            {"failure_reason", o.failure_reason ? ojson(*o.failure_reason) : ojson(nullptr)}};
}

namespace {

ojson subtasks_json(const std::vector<Subtask>& ts) {
    ojson out = ojson::array();
    for (const auto& t : ts) out.push_back({{"index", t.index}, {"description", t.description}, {"depends_on", t.depends_on}});
    return out;
}

ojson selection_json(const std::vector<SelectedCell>& cells) {
    ojson out = ojson::array();
    for (const auto& c : cells) {
        out.push_back({{"sheet", c.sheet}, {"addr", format_address(c.addr)}, {"value", cell_to_json(c.value)}});
    }
    return out;
}

std::string reformulation_notes(const Subtask& failed, const std::string& reason, const std::vector<Subtask>& rest) {
    std::string notes = "\nReformulate the remaining work. Step \"" + failed.description + "\" failed: " + reason + ".\n";
    if (!rest.empty()) {
        notes += "Steps not yet attempted:\n";
        for (const auto& t : rest) notes += "- " + t.description + "\n";
    }
    notes += "Plan only what is left to do, starting again from 1.\n";
    return notes;
}

class Turn {
public:
    Turn(Session& s, ChatBackend& backend) : s_(s), backend_(backend), cfg_(s.config()), wb_(s.workbook()) {}

    InstructionOutcome run(const std::string& text) {
        record(EventKind::instruction, std::nullopt, {{"text", text}});
        InstructionOutcome out;
        try {
            if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw Error("instruction is empty");
            run_plan(text);
        } catch (const Error& e) {
            aborted_ = e.what();
            record(EventKind::error, std::nullopt, {{"stage", "turn"}, {"reason", e.what()}});
        }

        out.executed_actions = executed_;
        out.summary = summarize(diffs_, cfg_.polish_summary ? &backend_ : nullptr);
        record(EventKind::summary, std::nullopt, {{"text", out.summary}});

        std::size_t done = 0;
        for (const auto& t : queue_)
            if (state_[t.index] == State::done) ++done;
        if (!aborted_ && done == queue_.size() && done > 0) {
            out.status = InstructionOutcome::Status::success;
        } else {
            out.status = done > 0 ? InstructionOutcome::Status::partial : InstructionOutcome::Status::failure;
            out.failure_reason = aborted_ ? *aborted_ : first_failure_;
        }
        return out;
    }

private:
    enum class State { pending, done, failed, skipped };

    struct StepResult {
        bool completed = false;
        std::string reason;
    };

    void record(EventKind kind, std::optional<int> subtask, ojson payload) {
        s_.transcript().append(kind, subtask, std::move(payload));
    }

    void note_failure(const std::string& why) {
        if (first_failure_.empty()) first_failure_ = why;
    }

    void run_plan(const std::string& text) {
        if (cfg_.manager) {
            Plan plan = manager_plan(text, extract_context(wb_), backend_);
            queue_ = plan.subtasks;
            record(EventKind::plan, std::nullopt, {{"source", "manager"}, {"subtasks", subtasks_json(queue_)}, {"raw", plan.raw}});
        } else {
            queue_ = {{1, text, {}}};
            record(EventKind::plan, std::nullopt, {{"source", "ablation"}, {"subtasks", subtasks_json(queue_)}});
        }

        int reformulations_left = cfg_.max_reformulations;
        std::size_t i = 0;
        while (i < queue_.size()) {
            Subtask t = queue_[i];
            state_[t.index] = State::pending;
            if (auto blocker = failed_dependency(t)) {
                state_[t.index] = State::skipped;
                std::string why = "skipped because step " + std::to_string(*blocker) + " did not complete";
                note_failure("step " + std::to_string(t.index) + " " + why);
                record(EventKind::error, t.index, {{"stage", "dependency"}, {"reason", why}});
                ++i;
                continue;
            }
            StepResult r = run_subtask(t);
            if (r.completed) {
                state_[t.index] = State::done;
                ++i;
                continue;
            }
            bool reformulate = cfg_.manager && reformulations_left > 0;
            record(EventKind::escalation, t.index, {{"reason", r.reason}, {"reformulate", reformulate}});
            if (reformulate) {
                --reformulations_left;
                std::vector<Subtask> rest(queue_.begin() + static_cast<std::ptrdiff_t>(i) + 1, queue_.end());
                Plan plan;
                try {
                    plan = manager_plan(text, extract_context(wb_), backend_, reformulation_notes(t, r.reason, rest));
                } catch (const PlanningFailure& e) {
                    fail(t, std::string("reformulation failed: ") + e.what());
                    ++i;
                    continue;
                }
                int offset = t.index - 1;
                for (auto& n : plan.subtasks) {
                    n.index += offset;
                    for (auto& d : n.depends_on) d += offset;
                }
                queue_.erase(queue_.begin() + static_cast<std::ptrdiff_t>(i), queue_.end());
                queue_.insert(queue_.end(), plan.subtasks.begin(), plan.subtasks.end());
                record(EventKind::plan, std::nullopt,
                       {{"source", "reformulation"}, {"subtasks", subtasks_json(plan.subtasks)}, {"raw", plan.raw}});
            } else {
                fail(t, r.reason);
                ++i;
            }
        }
    }

    void fail(const Subtask& t, const std::string& reason) {
        state_[t.index] = State::failed;
        note_failure("step " + std::to_string(t.index) + " failed: " + reason);
        record(EventKind::error, t.index, {{"stage", "subtask"}, {"reason", reason}});
    }

    std::optional<int> failed_dependency(const Subtask& t) {
        for (int d : t.depends_on) {
            auto it = state_.find(d);
            if (it != state_.end() && (it->second == State::failed || it->second == State::skipped)) return d;
        }
        return std::nullopt;
    }

    StepResult run_subtask(const Subtask& t) {
        int retries = 0;
        std::optional<std::string> feedback;
        auto rejected = [&](const std::string& why) -> std::optional<StepResult> {
            if (++retries > cfg_.max_action_retries) return StepResult{false, "retry budget exhausted: " + why};
            feedback = why;
            return std::nullopt;
        };

        while (true) {
            SheetContext ctx = extract_context(wb_);
            Generation g;
            try {
                g = action_generate(t, ctx, feedback, backend_);
            } catch (const GenerationFailure& e) {
                record(EventKind::verdict_pre, t.index,
                       {{"valid", false}, {"code", "parse"}, {"reason", e.what()}, {"judged", false}});
                if (auto stop = rejected(e.what())) return *stop;
                continue;
            }
            std::string text = serialize_action(g.action);
            record(EventKind::action_proposed, t.index,
                   {{"action", text}, {"attempt", retries + 1}, {"calls", g.calls}});

            Verdict v = validate_static(g.action, wb_);
            bool judged = cfg_.reflection && v.valid;
            if (judged) v = reflect_pre(t, g.action, wb_, backend_);
            ojson pre = {{"valid", v.valid}};
            if (!v.valid) {
                pre["code"] = std::string(to_string(v.code));
                pre["reason"] = v.reason;
            }
            pre["judged"] = judged;
            record(EventKind::verdict_pre, t.index, std::move(pre));
            if (!v.valid) {
                if (auto stop = rejected(v.reason)) return *stop;
                continue;
            }

            SheetSnapshot before = snapshot(wb_);
            ExecutionResult result;
            try {
                result = execute(wb_, g.action);
            } catch (const Error& e) {
                record(EventKind::error, t.index, {{"stage", "execute"}, {"action", text}, {"reason", e.what()}});
                if (auto stop = rejected(e.what())) return *stop;
                continue;
            }
            SheetSnapshot after = snapshot(wb_);
            s_.commit(wb_);
            diffs_.push_back(result.diff);
            executed_.push_back(text);
            ojson executed = {{"action", text}, {"diff", diff_to_json(result.diff)}};
            if (result.selection) executed["selection"] = selection_json(*result.selection);
            record(EventKind::executed, t.index, std::move(executed));

            if (!cfg_.reflection) return {true, {}};
            PostVerdict pv = reflect_post(t, g.action, before, after, result, backend_);
            ojson post = {{"verdict", std::string(to_string(pv.kind))}};
            if (pv.kind != PostVerdict::Kind::ok) post["text"] = pv.text;
            post["judged"] = !(is_mutating(g.action.op) && result.diff.empty());
            record(EventKind::verdict_post, t.index, std::move(post));
            switch (pv.kind) {
                case PostVerdict::Kind::ok: return {true, {}};
                case PostVerdict::Kind::escalate: return {false, pv.text};
                case PostVerdict::Kind::retry:
                    if (auto stop = rejected(pv.text)) return *stop;
                    break;
            }
        }
    }

    Session& s_;
    ChatBackend& backend_;
    PipelineConfig cfg_;
    Workbook wb_;
    std::vector<Subtask> queue_;
    std::map<int, State> state_;
    std::vector<SheetDiff> diffs_;
    std::vector<std::string> executed_;
    std::optional<std::string> aborted_;
    std::string first_failure_;
};

}  // namespace

InstructionOutcome run_instruction(Session& session, const std::string& text, ChatBackend& backend) {
    auto slot = session.begin_turn();
    return Turn(session, backend).run(text);
}

}  // namespace sheetmind
