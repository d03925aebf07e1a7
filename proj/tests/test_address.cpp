#include <gtest/gtest.h>

#include "sheetmind/address.hpp"
#include "sheetmind/error.hpp"
#include "generators.hpp"

using namespace sheetmind;

TEST(Address, ColumnLetters) {
    EXPECT_EQ(column_from_letters("A"), 1u);
    EXPECT_EQ(column_from_letters("E"), 5u);
    EXPECT_EQ(column_from_letters("Z"), 26u);
    EXPECT_EQ(column_from_letters("AA"), 27u);
    EXPECT_EQ(column_from_letters("XFD"), 16384u);
    EXPECT_FALSE(column_from_letters("XFE"));
    EXPECT_FALSE(column_from_letters("a"));
    EXPECT_FALSE(column_from_letters(""));
    EXPECT_FALSE(column_from_letters("AAAA"));
    EXPECT_EQ(column_letters(703), "AAA");
}

TEST(Address, ColumnLettersRoundTrip) {
    for (std::uint32_t c = 1; c <= kParseMaxCols; ++c) ASSERT_EQ(column_from_letters(column_letters(c)), c);
}

TEST(Address, ParsesRangeForms) {
    Range e = parse_range("E:E");
    EXPECT_TRUE(e.open_bottom);
    EXPECT_EQ(e.top_left, (CellAddress{5, 1}));
    EXPECT_EQ(e.bottom_right.col, 5u);

    Range e2 = parse_range("E2:E");
    EXPECT_TRUE(e2.open_bottom);
    EXPECT_EQ(e2.top_left.row, 2u);

    Range box = parse_range("B2:C4");
    EXPECT_FALSE(box.open_bottom);
    EXPECT_EQ(box.bottom_right, (CellAddress{3, 4}));
    EXPECT_EQ(box.width(), 2u);

    Range single = parse_range("Data!A1");
    EXPECT_EQ(single.sheet, "Data");
    EXPECT_TRUE(single.is_single_cell());

    Range quoted = parse_range("'It''s here'!A1:B2");
    EXPECT_EQ(quoted.sheet, "It's here");
}

TEST(Address, RejectsMalformedRanges) {
    for (const char* bad : {"", "A0", "a1", "B2:A1", "A1:", "1A", "A1048577", "XFE1", "'x!A1", "!A1", "A1:B2:C3"}) {
        EXPECT_THROW(parse_range(bad), ParseError) << bad;
    }
}

TEST(Address, ErrorsNameTheToken) {
    try {
        parse_range("B2:A1");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_NE(std::string(e.what()).find("B2:A1"), std::string::npos);
    }
}

TEST(Address, FormatRoundTripsRandomRanges) {
    testkit::Rng rng(7);
    for (int i = 0; i < 5000; ++i) {
        Range r = testkit::random_any_range(rng);
        ASSERT_EQ(parse_range(format_range(r)), r) << format_range(r);
    }
}

TEST(Address, SheetNameRules) {
    EXPECT_TRUE(is_bare_sheet_name("Sheet1"));
    EXPECT_FALSE(is_bare_sheet_name("My Sheet"));
    EXPECT_FALSE(is_bare_sheet_name("1abc"));
    EXPECT_TRUE(is_valid_sheet_name("My Sheet"));
    EXPECT_FALSE(is_valid_sheet_name("a!b"));
    EXPECT_FALSE(is_valid_sheet_name("a:b"));
    EXPECT_FALSE(is_valid_sheet_name(""));
    EXPECT_TRUE(iequals("DATA", "data"));
}
