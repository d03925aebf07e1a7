#include <gtest/gtest.h>

#include "sheetmind/context.hpp"
#include "sheetmind/prompts.hpp"
#include "sheetmind/workbook_io.hpp"

#include <fstream>
#include <sstream>

using namespace sheetmind;

TEST(Context, ExtentsSampleAndHistogram) {
    Workbook wb = load_csv("a,1\n2024-01-01,TRUE\n");
    wb.add_sheet("Data");
    set_cell(wb, "Data", {30, 40}, 5.0);
    set_cell(wb, "Sheet1", {27, 1}, Text{"beyond the sample"});
    SheetContext ctx = extract_context(wb);
    ASSERT_EQ(ctx.sheets.size(), 2u);
    EXPECT_EQ(ctx.sheets[0], (SheetExtent{"Sheet1", 2, 27}));
    EXPECT_EQ(ctx.sheets[1], (SheetExtent{"Data", 40, 30}));
    EXPECT_EQ(ctx.sample.size(), 4u);
    EXPECT_EQ(ctx.histogram.at("number"), 2u);
    EXPECT_EQ(ctx.histogram.at("text"), 2u);
    EXPECT_EQ(ctx.histogram.at("date"), 1u);
    EXPECT_EQ(ctx.histogram.at("bool"), 1u);
    std::string r = ctx.render();
    EXPECT_NE(r.find("Sheet1"), std::string::npos);
    EXPECT_NE(r.find("Data"), std::string::npos);
}

TEST(Context, LongTextIsTruncated) {
    Workbook wb;
    set_cell(wb, "Sheet1", {1, 1}, Text{std::string(1000, 'x')});
    SheetContext ctx = extract_context(wb);
    ASSERT_EQ(ctx.sample.size(), 1u);
    EXPECT_LE(ctx.sample[0].text.size(), kSampleTextLimit);
    EXPECT_TRUE(ctx.sample[0].text.ends_with(kTruncationMarker));
}

TEST(Context, TruncationRespectsUtf8) {
    std::string s;
    for (int i = 0; i < 200; ++i) s += "\xC3\xA9";  // é
    for (std::size_t limit = 6; limit < 40; ++limit) {
        std::string t = truncate_text(s, limit);
        EXPECT_LE(t.size(), limit);
        std::string body = t.substr(0, t.size() - kTruncationMarker.size());
        EXPECT_EQ(body.size() % 2, 0u) << limit;
    }
    EXPECT_EQ(truncate_text("short"), "short");
}

TEST(Prompts, ShippedTemplatesMatchFiles) {
    for (auto name : kPromptNames) {
        std::ifstream in(std::string(SHEETMIND_PROMPT_DIR) + "/" + std::string(name) + ".txt");
        std::stringstream buf;
        buf << in.rdbuf();
        EXPECT_EQ(prompt_template(name), buf.str()) << name;
    }
    EXPECT_THROW(prompt_template("nope"), Error);
}

TEST(Prompts, RenderSubstitutesOnce) {
    EXPECT_EQ(render_template("a {{x}} b {{y}}", {{"x", "{{y}}"}, {"y", "2"}}), "a {{y}} b 2");
    EXPECT_THROW(render_template("{{missing}}", {}), Error);
    Conversation c = build_prompt("summary", {{"summary", "Cleared 2 cells in E."}});
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0].role, Role::system);
    EXPECT_EQ(c[1].role, Role::user);
    EXPECT_NE(c[1].content.find("Cleared 2 cells in E."), std::string::npos);
}
