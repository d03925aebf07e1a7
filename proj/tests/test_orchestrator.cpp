#include <gtest/gtest.h>

#include "sheetmind/backend.hpp"
#include "sheetmind/orchestrator.hpp"
#include "sheetmind/session.hpp"
#include "sheetmind/workbook_io.hpp"

using namespace sheetmind;

namespace {

const std::string kInstruction = "Delete any element from the fifth column that starts with a number";
const std::string kGood = "DELETE(E:E) WHERE MATCHES(\"^[0-9]\")";

Workbook column_e() { return load_csv(",,,,9am\n,,,,late\n,,,,3pm\n"); }

ScriptEntry manager(std::string reply, std::string match = "Decompose") { return {match, std::move(reply), "manager"}; }
ScriptEntry action(std::string reply, std::string match = "Step: ") { return {match, std::move(reply), "action"}; }
ScriptEntry pre(std::string reply) { return {std::string("Answer VALID or INVALID"), std::move(reply), "judge_pre"}; }
ScriptEntry post(std::string reply) { return {std::string("Answer with one of OK"), std::move(reply), "judge_post"}; }

std::vector<Event> of_kind(const Session& s, EventKind k) {
    std::vector<Event> out;
    for (auto& e : s.transcript().events())
        if (e.kind == k) out.push_back(e);
    return out;
}

Workbook expected_e() { return load_csv(",,,,\n,,,,late\n"); }

}  // namespace

TEST(Orchestrator, WorkedExample) {
    Session s("a", column_e(), {}, true);
    ScriptedBackend b({manager("1. Clear every cell in column E whose text starts with a digit"), action(kGood),
                       pre("VALID"), post("OK")});
    InstructionOutcome o = run_instruction(s, kInstruction, b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::success);
    EXPECT_EQ(o.executed_actions, (std::vector<std::string>{kGood}));
    EXPECT_EQ(o.summary, "Cleared 2 cells in E.");
    EXPECT_FALSE(o.failure_reason);
    const Sheet& sheet = s.workbook().active_sheet();
    EXPECT_TRUE(is_empty(sheet.get({5, 1})));
    EXPECT_EQ(sheet.get({5, 2}), CellValue(Text{"late"}));
    EXPECT_TRUE(is_empty(sheet.get({5, 3})));
    EXPECT_EQ(b.remaining(), 0u);
}

TEST(Orchestrator, InvalidThenValid) {
    Session s("a", column_e(), {}, true);
    ScriptedBackend b({manager("1. Clear digit-leading cells in E"), action("DELETE(E:E)"),
                       pre("INVALID: this also clears late"),
                       action(kGood, "Your previous action was rejected: this also clears late"), pre("VALID"),
                       post("OK")});
    InstructionOutcome o = run_instruction(s, kInstruction, b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::success);
    EXPECT_EQ(o.executed_actions.size(), 1u);
    auto pres = of_kind(s, EventKind::verdict_pre);
    ASSERT_EQ(pres.size(), 2u);
    EXPECT_FALSE(pres[0].payload["valid"].get<bool>());
    EXPECT_TRUE(pres[1].payload["valid"].get<bool>());
    EXPECT_EQ(of_kind(s, EventKind::executed).size(), 1u);
}

TEST(Orchestrator, RetryBudgetBoundsBackendCalls) {
    Session s("a", column_e(), {}, true);
    BackendScript script = {manager("1. Clear digit-leading cells in E")};
    for (int i = 0; i < 4; ++i) {
        script.push_back(action("DELETE(E:E)"));
        script.push_back(pre("INVALID: too broad"));
    }
    script.push_back(manager("1. Clear cells in E that begin with a digit", "Reformulate the remaining work"));
    for (int i = 0; i < 4; ++i) {
        script.push_back(action("DELETE(E:E)"));
        script.push_back(pre("INVALID: too broad"));
    }
    ScriptedBackend b(script);
    InstructionOutcome o = run_instruction(s, kInstruction, b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::failure);
    EXPECT_EQ(b.calls(), 18u);
    EXPECT_EQ(b.remaining(), 0u);
    EXPECT_TRUE(o.executed_actions.empty());
    EXPECT_EQ(s.workbook(), column_e());
    ASSERT_TRUE(o.failure_reason);
    EXPECT_NE(o.failure_reason->find("retry budget"), std::string::npos);
    EXPECT_EQ(of_kind(s, EventKind::escalation).size(), 2u);
}

TEST(Orchestrator, NoChangeTriggersRetryWithoutJudge) {
    Session s("a", column_e(), {}, true);
    ScriptedBackend b({manager("1. Clear digit-leading cells in E"), action("DELETE(E:E) WHERE MATCHES(\"^x\")"),
                       pre("VALID"), action(kGood, "no change detected"), pre("VALID"), post("OK")});
    InstructionOutcome o = run_instruction(s, kInstruction, b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::success);
    auto posts = of_kind(s, EventKind::verdict_post);
    ASSERT_EQ(posts.size(), 2u);
    EXPECT_EQ(posts[0].payload["verdict"], "retry");
    EXPECT_EQ(posts[0].payload["text"], "no change detected");
    EXPECT_FALSE(posts[0].payload["judged"].get<bool>());
    EXPECT_EQ(o.executed_actions.size(), 2u);
}

TEST(Orchestrator, EscalationReformulatesRemainingWork) {
    Workbook wb = load_csv("3\n1\n2\n");
    Session s("a", wb, {}, true);
    ScriptedBackend b({manager("1. Sort column A ascending\n2. Total column A into B1 [after 1]"),
                       action("SORT(A1:A3, key=A)"), pre("VALID"), post("OK"), action("SELECT(A:A)"), pre("VALID"),
                       post("ESCALATE: the total should go to C1"),
                       manager("1. Total column A into C1", "Reformulate the remaining work"),
                       action("AGGREGATE(A:A, C1, fn=SUM)"), pre("VALID"), post("OK")});
    InstructionOutcome o = run_instruction(s, "Sort A and total it", b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::success);
    EXPECT_EQ(s.workbook().active_sheet().get({3, 1}), CellValue(6.0));
    auto plans = of_kind(s, EventKind::plan);
    ASSERT_EQ(plans.size(), 2u);
    EXPECT_EQ(plans[1].payload["source"], "reformulation");
    EXPECT_EQ(plans[1].payload["subtasks"][0]["index"], 2);
}

TEST(Orchestrator, FailedDependencySkipsLaterSteps) {
    PipelineConfig cfg;
    cfg.max_reformulations = 0;
    cfg.max_action_retries = 0;
    Session s("a", column_e(), cfg, true);
    ScriptedBackend b({manager("1. Clear column E\n2. Write done in A1 [after 1]\n3. Write x in B1"),
                       action("DELETE(E:E)"), pre("INVALID: no"), action("SET(B1, \"x\")"), pre("VALID"),
                       post("OK")});
    InstructionOutcome o = run_instruction(s, "do things", b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::partial);
    auto errors = of_kind(s, EventKind::error);
    ASSERT_EQ(errors.size(), 2u);
    EXPECT_EQ(errors[1].payload["stage"], "dependency");
    EXPECT_EQ(errors[1].subtask, 2);
}

TEST(Orchestrator, BackendFailureAbortsButKeepsExecutedEffects) {
    Session s("a", column_e(), {}, true);
    ScriptedBackend b({manager("1. Clear digit-leading cells in E"), action(kGood), pre("VALID")});
    InstructionOutcome o = run_instruction(s, kInstruction, b);
    EXPECT_EQ(o.status, InstructionOutcome::Status::failure);
    ASSERT_TRUE(o.failure_reason);
    EXPECT_NE(o.failure_reason->find("script exhausted"), std::string::npos);
    EXPECT_EQ(of_kind(s, EventKind::summary).size(), 1u);
    EXPECT_EQ(o.executed_actions.size(), 1u);
    EXPECT_EQ(s.workbook(), expected_e());
}

TEST(Orchestrator, EmptyInstructionFails) {
    Session s("a", column_e(), {}, true);
    ScriptedBackend b({});
    EXPECT_EQ(run_instruction(s, "   ", b).status, InstructionOutcome::Status::failure);
    EXPECT_EQ(b.calls(), 0u);
}

TEST(Orchestrator, AblationsNeverCallDisabledAgents) {
    for (auto label : kAblations) {
        PipelineConfig cfg = PipelineConfig::for_ablation(label);
        Session s("a", column_e(), cfg, true);
        BackendScript script;
        if (cfg.manager) script.push_back(manager("1. Clear digit-leading cells in E"));
        script.push_back(action(kGood));
        if (cfg.reflection) {
            script.push_back(pre("VALID"));
            script.push_back(post("OK"));
        }
        ScriptedBackend b(script);
        InstructionOutcome o = run_instruction(s, kInstruction, b);
        EXPECT_EQ(o.status, InstructionOutcome::Status::success) << label;
        for (const auto& p : b.prompts()) {
            if (!cfg.manager) {
                EXPECT_EQ(p.find("Decompose"), std::string::npos) << label;
            }
            if (!cfg.reflection) {
                EXPECT_EQ(p.find("Answer VALID or INVALID"), std::string::npos) << label;
                EXPECT_EQ(p.find("Answer with one of OK"), std::string::npos) << label;
            }
        }
        EXPECT_EQ(s.workbook(), expected_e()) << label;
    }
}

// Folding the executed diffs over the starting workbook gives the final workbook.
TEST(Orchestrator, TranscriptFoldReconstructsWorkbook) {
    Workbook start = load_csv("3,a\n1,b\n2,c\n");
    Session s("a", start, {}, true);
    ScriptedBackend b({manager("1. Sort by A\n2. Insert a row at the top\n3. Write Total in A1"),
                       action("SORT(A1:B3, key=A)"), pre("VALID"), post("OK"), action("INSERT_ROWS(1)"),
                       pre("VALID"), post("OK"), action("SET(A1, \"Total\")"), pre("VALID"), post("OK")});
    ASSERT_EQ(run_instruction(s, "tidy", b).status, InstructionOutcome::Status::success);
    Workbook folded = start;
    for (const auto& e : of_kind(s, EventKind::executed)) folded = apply_diff(folded, diff_from_json(e.payload["diff"]));
    EXPECT_EQ(folded, s.workbook());
    EXPECT_EQ(save_csv(folded), "Total,\n1,b\n2,c\n3,a\n");
}

TEST(Orchestrator, ReplayIsDeterministic) {
    auto run_once = [] {
        Session s("fixed", column_e(), {}, true);
        ScriptedBackend b({manager("1. Clear digit-leading cells in E"), action("DELETE(E:E)"),
                           pre("INVALID: too broad"), action(kGood), pre("VALID"), post("OK")});
        run_instruction(s, kInstruction, b);
        return std::make_pair(s.transcript().to_jsonl(), workbook_hash(s.workbook()));
    };
    EXPECT_EQ(run_once(), run_once());
}
