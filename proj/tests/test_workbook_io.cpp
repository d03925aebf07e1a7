#include <gtest/gtest.h>

#include "generators.hpp"
#include "sheetmind/error.hpp"
#include "sheetmind/hash.hpp"
#include "sheetmind/workbook_io.hpp"

using namespace sheetmind;

TEST(Csv, TypesEachField) {
    Workbook wb = load_csv("name,when,n,ok\r\nann,2024-01-05,3.5,true\n\"b, c\",\"say \"\"hi\"\"\",,=1+1\n");
    const Sheet& s = wb.active_sheet();
    EXPECT_EQ(s.name(), "Sheet1");
    EXPECT_EQ(s.get({2, 2}), CellValue(Date{"2024-01-05"}));
    EXPECT_EQ(s.get({3, 2}), CellValue(3.5));
    EXPECT_EQ(s.get({4, 2}), CellValue(true));
    EXPECT_EQ(s.get({1, 3}), CellValue(Text{"b, c"}));
    EXPECT_EQ(s.get({2, 3}), CellValue(Text{"say \"hi\""}));
    EXPECT_TRUE(is_empty(s.get({3, 3})));
    EXPECT_EQ(s.get({4, 3}), CellValue(Formula{"=1+1"}));
}

TEST(Csv, MalformedQuotingFails) {
    EXPECT_THROW(load_csv("a,\"b\n"), ParseError);
    EXPECT_THROW(load_csv("a,\"b\"c\n"), ParseError);
    EXPECT_THROW(load_csv("a,b\"c\n"), ParseError);
}

TEST(Csv, SaveQuotesWhenNeeded) {
    Workbook wb;
    set_cell(wb, "Sheet1", {1, 1}, Text{"a,b"});
    set_cell(wb, "Sheet1", {3, 2}, 2.0);
    EXPECT_EQ(save_csv(wb), "\"a,b\",,\n,,2\n");
    EXPECT_EQ(load_csv(save_csv(wb)), wb);
}

TEST(WorkbookJson, Shape) {
    Workbook wb;
    set_cell(wb, "Sheet1", {2, 1}, Text{"x"});
    set_cell(wb, "Sheet1", {1, 2}, 1.0);
    auto j = workbook_to_json(wb);
    EXPECT_EQ(j.dump(), R"({"sheets":[{"name":"Sheet1","cells":{"B1":{"t":"s","v":"x"},"A2":{"t":"n","v":1.0}}}],"active":0})");
}

TEST(WorkbookJson, RejectsBadInput) {
    for (const char* bad : {
             R"({})",
             R"({"sheets":[{"name":"a!b","cells":{}}],"active":0})",
             R"({"sheets":[{"name":"S","cells":{"A0":{"t":"n","v":1}}}],"active":0})",
             R"({"sheets":[{"name":"S","cells":{"A1":{"t":"d","v":"2023-02-29"}}}],"active":0})",
             R"({"sheets":[{"name":"S","cells":{"A1":{"t":"f","v":"1+1"}}}],"active":0})",
             R"({"sheets":[{"name":"S","cells":{"A1":{"t":"q","v":1}}}],"active":0})",
             R"({"sheets":[{"name":"S","cells":{}}],"active":3})",
             R"({"sheets":[{"name":"S","cells":{}},{"name":"s","cells":{}}],"active":0})",
             R"({"sheets":[)",
         }) {
        EXPECT_THROW(load_workbook(bad, WorkbookFormat::json), ParseError) << bad;
    }
}

// save(load(save(wb))) is byte-identical.
TEST(WorkbookJsonProperty, SaveLoadSaveIsStable) {
    testkit::Rng rng(21);
    for (int i = 0; i < 300; ++i) {
        Workbook wb = testkit::random_workbook(rng, {15, 8, 3});
        std::string once = save_workbook(wb, WorkbookFormat::json);
        Workbook back = load_workbook(once, WorkbookFormat::json);
        ASSERT_EQ(back, wb);
        ASSERT_EQ(save_workbook(back, WorkbookFormat::json), once);
        ASSERT_EQ(workbook_hash(back), workbook_hash(wb));
    }
}

TEST(DiffJson, RoundTrips) {
    testkit::Rng rng(22);
    for (int i = 0; i < 200; ++i) {
        Workbook s = testkit::random_workbook(rng);
        Workbook t = testkit::random_edit(rng, s);
        SheetDiff d = diff(s, t);
        ASSERT_EQ(diff_from_json(nlohmann::ordered_json::parse(diff_to_json(d).dump())), d);
    }
}

TEST(Hash, KnownDigest) {
    EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    Workbook a, b;
    set_cell(b, "Sheet1", {1, 1}, 1.0);
    EXPECT_NE(workbook_hash(a), workbook_hash(b));
}
