#include <gtest/gtest.h>

#include "generators.hpp"
#include "oracle.hpp"
#include "sheetmind/exec.hpp"
#include "sheetmind/grammar.hpp"
#include "sheetmind/workbook_io.hpp"

using namespace sheetmind;

namespace {

Workbook column_e() {
    Workbook wb = load_csv(",,,,9am\n,,,,late\n,,,,3pm\n");
    return wb;
}

ExecutionResult run(Workbook& wb, std::string_view text) { return execute(wb, parse_action(text)); }

}  // namespace

TEST(Exec, WorkedExampleClearsDigitLeadingCells) {
    Workbook wb = column_e();
    ExecutionResult r = run(wb, "DELETE(E:E) WHERE MATCHES(\"^[0-9]\")");
    EXPECT_TRUE(is_empty(wb.active_sheet().get({5, 1})));
    EXPECT_EQ(wb.active_sheet().get({5, 2}), CellValue(Text{"late"}));
    EXPECT_TRUE(is_empty(wb.active_sheet().get({5, 3})));
    EXPECT_EQ(r.diff.cell_changes.size(), 2u);
    EXPECT_TRUE(r.mutated);
    EXPECT_FALSE(r.selection);
}

TEST(Exec, SelectReportsWithoutMutating) {
    Workbook wb = column_e();
    Workbook before = wb;
    ExecutionResult r = run(wb, "SELECT(E:E) WHERE MATCHES(\"m$\")");
    EXPECT_EQ(wb, before);
    EXPECT_FALSE(r.mutated);
    ASSERT_TRUE(r.selection);
    ASSERT_EQ(r.selection->size(), 2u);
    EXPECT_EQ((*r.selection)[1].addr, (CellAddress{5, 3}));
}

TEST(Exec, ComparisonsNeverCoerceTypes) {
    Workbook wb = load_csv("2\n\"2\"\n");
    set_cell(wb, "Sheet1", {1, 2}, Text{"2"});
    run(wb, "DELETE(A:A) WHERE VALUE = 2");
    EXPECT_TRUE(is_empty(wb.active_sheet().get({1, 1})));
    EXPECT_EQ(wb.active_sheet().get({1, 2}), CellValue(Text{"2"}));
}

TEST(Exec, DeleteRowsRunsBottomUp) {
    Workbook wb = load_csv("a,1\n,2\nb,3\n,4\n");
    run(wb, "DELETE_ROWS(A:A) WHERE ISEMPTY");
    EXPECT_EQ(save_csv(wb), "a,1\nb,3\n");
}

TEST(Exec, SortIsStableAndEmptyKeysGoLast) {
    Workbook wb = load_csv("b,1\n,2\na,3\nb,4\n");
    run(wb, "SORT(A1:B4, key=A, order=DESC)");
    EXPECT_EQ(save_csv(wb), "b,1\nb,4\na,3\n,2\n");
}

TEST(Exec, AggregateFunctions) {
    Workbook wb = load_csv("1\n2\nx\n4\n");
    run(wb, "AGGREGATE(A:A, B1, fn=SUM)");
    run(wb, "AGGREGATE(A:A, B2, fn=AVG) WHERE VALUE > 1");
    run(wb, "AGGREGATE(A:A, B3, fn=COUNT)");
    run(wb, "AGGREGATE(A:A, B4, fn=MAX) WHERE ISEMPTY");
    const Sheet& s = wb.active_sheet();
    EXPECT_EQ(s.get({2, 1}), CellValue(7.0));
    EXPECT_EQ(s.get({2, 2}), CellValue(3.0));
    EXPECT_EQ(s.get({2, 3}), CellValue(4.0));
    EXPECT_TRUE(is_empty(s.get({2, 4})));
}

TEST(Exec, FailuresLeaveTheWorkbookUntouched) {
    Workbook wb = load_csv("1,2\n3,4\n");
    wb.active_sheet().set({1, kMaxRows}, 1.0);
    Workbook before = wb;
    EXPECT_THROW(run(wb, "INSERT_ROWS(1)"), BoundsError);
    EXPECT_EQ(wb, before);
    EXPECT_THROW(run(wb, "SET(Nope!A1, 1)"), SemanticViolation);
    EXPECT_EQ(wb, before);
    EXPECT_THROW(run(wb, "COPY(A1:B2, B2)"), SemanticViolation);
    EXPECT_EQ(wb, before);
    wb.active_sheet().set({3, 1}, 1e308);
    wb.active_sheet().set({3, 2}, 1e308);
    before = wb;
    EXPECT_THROW(run(wb, "AGGREGATE(C1:C2, D1, fn=SUM)"), ExecutionError);
    EXPECT_EQ(wb, before);
}

TEST(Exec, ScriptsStopAtFirstFailure) {
    Workbook wb;
    ScriptExecution r = execute_script(wb, parse_script("SET(A1, 1); SET(Nope!A1, 2); SET(A2, 3)"));
    EXPECT_FALSE(r.ok());
    EXPECT_EQ(r.failed_index, 1u);
    EXPECT_EQ(r.results.size(), 1u);
    EXPECT_TRUE(is_empty(wb.active_sheet().get({1, 2})));
}

// The engine agrees with the dense reference interpreter.
TEST(ExecProperty, MatchesOracle) {
    testkit::Rng rng(51);
    for (int i = 0; i < 1500; ++i) {
        Workbook wb = testkit::random_workbook(rng);
        Action a = testkit::random_valid_action(rng, wb);
        testkit::OracleResult expected = testkit::oracle_execute(wb, a);
        Workbook actual = wb;
        try {
            ExecutionResult r = execute(actual, a);
            ASSERT_FALSE(expected.error) << serialize_action(a);
            ASSERT_EQ(actual, expected.wb) << serialize_action(a);
            if (a.op == Verb::SELECT) {
                ASSERT_EQ(*r.selection, expected.selection) << serialize_action(a);
            }
            ASSERT_EQ(apply_diff(wb, r.diff), actual) << serialize_action(a);
        } catch (const ExecutionError&) {
            ASSERT_TRUE(expected.error) << serialize_action(a);
            ASSERT_EQ(actual, wb);
        }
    }
}

TEST(ExecProperty, Deterministic) {
    testkit::Rng rng(52);
    for (int i = 0; i < 300; ++i) {
        Workbook wb = testkit::random_workbook(rng);
        Action a = testkit::random_valid_action(rng, wb);
        Workbook x = wb, y = wb;
        try {
            ExecutionResult rx = execute(x, a);
            ExecutionResult ry = execute(y, a);
            ASSERT_EQ(rx, ry);
            ASSERT_EQ(x, y);
        } catch (const Error&) {
        }
    }
}
