#include "generators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "sheetmind/validate.hpp"

namespace sheetmind::testkit {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

namespace {

template <class T, std::size_t N>
const T& pick(Rng& rng, const std::array<T, N>& xs) {
    return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(N) - 1))];
}

double random_number(Rng& rng) {
    switch (uniform(rng, 0, 4)) {
        case 0: return uniform(rng, -20, 20);
        case 1: return uniform(rng, -1000, 1000) / 4.0;
        case 2: return std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
        case 3: {
            double m = std::uniform_real_distribution<double>(1, 10)(rng);
            return (chance(rng, 0.5) ? -m : m) * std::pow(10.0, uniform(rng, -300, 300));
        }
        default: return chance(rng, 0.5) ? 0.0 : -0.0;
    }
}

std::string random_date(Rng& rng) {
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    int y = uniform(rng, 1900, 2100), m = uniform(rng, 1, 12);
    bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    int d = uniform(rng, 1, kDays[m - 1] + (m == 2 && leap ? 1 : 0));
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

const std::array<std::string, 12> kPatterns = {"^[0-9]", "^a", "x$", "[aeiou]", "^[A-Z]+$", "1",
                                               "^-",     ".",  "^$", "(ab|cd)", "^[0-9]+(\\.[0-9]+)?$", "TRUE"};

}  // namespace

std::string random_text(Rng& rng, std::size_t max_len) {
    static const std::array<std::string, 16> kPieces = {"a",  "b",  "x",   "9",   "am", " ", "\"", "\\",
                                                        "'",  "é",  "中", "=",   "1",  "-", "abc", "TRUE"};
    std::string out;
    std::size_t n = static_cast<std::size_t>(uniform(rng, 1, static_cast<int>(max_len)));
    while (out.size() < n) out += pick(rng, kPieces);
    return out;
}

CellValue random_literal(Rng& rng) {
    switch (uniform(rng, 0, 3)) {
        case 0: return Text{random_text(rng, 8)};
        case 1: return random_number(rng);
        case 2: return chance(rng, 0.5);
        default: return Date{random_date(rng)};
    }
}

CellValue random_cell(Rng& rng) {
    switch (uniform(rng, 0, 5)) {
        case 0:
        case 1: {
            static const std::array<std::string, 10> kWords = {"9am", "late", "3pm", "apple", "x", "abc",
                                                               "10",  "-",    "Bob", "ab"};
            return Text{chance(rng, 0.7) ? pick(rng, kWords) : random_text(rng, 6)};
        }
        case 2: return static_cast<double>(uniform(rng, -5, 30));
        case 3: return chance(rng, 0.5);
        case 4: return Date{random_date(rng)};
        default: return Formula{"=A" + std::to_string(uniform(rng, 1, 9)) + "+1"};
    }
}

std::string random_sheet_name(Rng& rng) {
    static const std::array<std::string, 10> kNames = {"Sheet1", "Data",  "My Sheet", "It's", "R2D2",
                                                       "A1",     "TRUE",  "_x",       "Q1 2024", "données"};
    return pick(rng, kNames);
}

Range random_any_range(Rng& rng) {
    Range r;
    if (chance(rng, 0.3)) r.sheet = random_sheet_name(rng);
    auto col = [&] {
        return static_cast<std::uint32_t>(chance(rng, 0.9) ? uniform(rng, 1, 30) : uniform(rng, 1, kParseMaxCols));
    };
    auto row = [&] {
        return static_cast<std::uint32_t>(chance(rng, 0.9) ? uniform(rng, 1, 50) : uniform(rng, 1, kParseMaxRows));
    };
    std::uint32_t c1 = col(), c2 = col(), r1 = row(), r2 = row();
    if (c1 > c2) std::swap(c1, c2);
    if (r1 > r2) std::swap(r1, r2);
    switch (uniform(rng, 0, 2)) {
        case 0: r.top_left = r.bottom_right = {c1, r1}; break;
        case 1: r.top_left = {c1, r1}, r.bottom_right = {c2, r2}; break;
        default:
            r.open_bottom = true;
            r.top_left = {c1, chance(rng, 0.5) ? 1u : r1};
            r.bottom_right = {chance(rng, 0.6) ? c1 : c2, 0};
    }
    return r;
}

Condition random_condition(Rng& rng, int depth) {
    int kind = depth <= 0 ? uniform(rng, 3, 5) : uniform(rng, 0, 5);
    switch (kind) {
        case 0:
        case 1: {
            std::vector<Condition> children;
            int n = uniform(rng, 2, 3);
            for (int i = 0; i < n; ++i) children.push_back(random_condition(rng, depth - 1));
            return kind == 0 ? Condition::all_of(std::move(children)) : Condition::any_of(std::move(children));
        }
        case 2: return Condition::negate(random_condition(rng, depth - 1));
        case 3: {
            static const std::array<CmpOp, 6> kOps = {CmpOp::eq, CmpOp::ne, CmpOp::lt, CmpOp::le, CmpOp::gt, CmpOp::ge};
            return Condition::compare(pick(rng, kOps), random_literal(rng));
        }
        case 4: return Condition::matches(chance(rng, 0.8) ? pick(rng, kPatterns) : random_text(rng, 5));
        default: return Condition::is_empty();
    }
}

namespace {

std::string random_columns(Rng& rng) { return column_letters(static_cast<std::uint32_t>(uniform(rng, 1, 40))); }

void add_named(Rng& rng, Action& a, Named n) {
    auto at = a.args.begin() + uniform(rng, 0, static_cast<int>(a.args.size()));
    a.args.insert(at, std::move(n));
}

}  // namespace

Action random_any_action(Rng& rng) {
    static const std::array<std::string, 2> kOrders = {"ASC", "DESC"};
    static const std::array<std::string, 5> kFns = {"SUM", "AVG", "MIN", "MAX", "COUNT"};
    Action a;
    a.op = kAllVerbs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(kAllVerbs.size()) - 1))];
    switch (a.op) {
        case Verb::SELECT:
        case Verb::DELETE:
        case Verb::DELETE_ROWS:
        case Verb::DELETE_COLS: a.args = {random_any_range(rng)}; break;
        case Verb::SET: a.args = {random_any_range(rng), Literal{random_literal(rng)}}; break;
        case Verb::INSERT_ROWS:
        case Verb::INSERT_COLS:
            a.args = {Literal{static_cast<double>(uniform(rng, -3, 200))}};
            if (chance(rng, 0.5)) add_named(rng, a, {"count", static_cast<double>(uniform(rng, 0, 9))});
            break;
        case Verb::SORT:
            a.args = {random_any_range(rng)};
            add_named(rng, a, {"key", Text{random_columns(rng)}});
            if (chance(rng, 0.5)) add_named(rng, a, {"order", Text{pick(rng, kOrders)}});
            break;
        case Verb::COPY: a.args = {random_any_range(rng), random_any_range(rng)}; break;
        case Verb::AGGREGATE:
            a.args = {random_any_range(rng), random_any_range(rng)};
            add_named(rng, a, {"fn", Text{pick(rng, kFns)}});
            break;
    }
    const Signature& sig = signature(a.op);
    if (sig.cond_required || (sig.conditionable && chance(rng, 0.6))) a.cond = random_condition(rng, uniform(rng, 0, 3));
    return a;
}

Workbook random_workbook(Rng& rng, GridShape shape) {
    static const std::array<std::string, 4> kSheetNames = {"Sheet1", "Data", "Summary", "Notes"};
    int n = uniform(rng, 1, shape.max_sheets);
    std::vector<Sheet> sheets;
    for (int i = 0; i < n; ++i) {
        Sheet s(kSheetNames[static_cast<std::size_t>(i)]);
        int rows = uniform(rng, 0, shape.max_rows), cols = uniform(rng, 1, shape.max_cols);
        double density = std::uniform_real_distribution<double>(0.2, 0.9)(rng);
        for (int r = 1; r <= rows; ++r)
            for (int c = 1; c <= cols; ++c)
                if (chance(rng, density)) s.set({static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(r)}, random_cell(rng));
        sheets.push_back(std::move(s));
    }
    return Workbook(std::move(sheets), static_cast<std::size_t>(uniform(rng, 0, n - 1)));
}

Workbook random_edit(Rng& rng, const Workbook& base) {
    Workbook wb = base;
    int edits = uniform(rng, 0, 6);
    for (int e = 0; e < edits; ++e) {
        std::string name = wb.sheets()[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(wb.sheets().size()) - 1))].name();
        Sheet& s = wb.sheet(name);
        auto at = static_cast<std::uint32_t>(uniform(rng, 1, 22));
        auto count = static_cast<std::uint32_t>(uniform(rng, 1, 3));
        switch (uniform(rng, 0, 9)) {
            case 0: s.insert_rows(at, count); break;
            case 1: s.delete_rows(at, count); break;
            case 2: s.insert_cols(std::min(at, 12u), count); break;
            case 3: s.delete_cols(std::min(at, 12u), count); break;
            case 4:
                if (wb.sheets().size() < 4) {
                    std::string extra = "Extra" + std::to_string(uniform(rng, 1, 99));
                    if (!wb.find(extra)) {
                        Sheet& added = wb.add_sheet(extra, static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(wb.sheets().size()))));
                        added.set({1, 1}, random_cell(rng));
                    }
                }
                break;
            case 5:
                if (wb.sheets().size() > 1) wb.remove_sheet(s.name());
                break;
            case 6: wb.set_active(static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(wb.sheets().size()) - 1))); break;
            default: {
                int writes = uniform(rng, 1, 8);
                for (int w = 0; w < writes; ++w) {
                    CellAddress a{static_cast<std::uint32_t>(uniform(rng, 1, 12)), static_cast<std::uint32_t>(uniform(rng, 1, 24))};
                    s.set(a, chance(rng, 0.25) ? CellValue{Empty{}} : random_cell(rng));
                }
            }
        }
    }
    return wb;
}

namespace {

Range small_range(Rng& rng, const Workbook& wb) {
    Range r;
    if (chance(rng, 0.2)) r.sheet = wb.sheets()[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(wb.sheets().size()) - 1))].name();
    auto c1 = static_cast<std::uint32_t>(uniform(rng, 1, 12));
    auto c2 = static_cast<std::uint32_t>(uniform(rng, static_cast<int>(c1), std::min(14, static_cast<int>(c1) + 4)));
    auto r1 = static_cast<std::uint32_t>(uniform(rng, 1, 22));
    auto r2 = static_cast<std::uint32_t>(uniform(rng, static_cast<int>(r1), static_cast<int>(r1) + 10));
    switch (uniform(rng, 0, 3)) {
        case 0: r.top_left = r.bottom_right = {c1, r1}; break;
        case 1: r.open_bottom = true, r.top_left = {c1, chance(rng, 0.5) ? 1u : r1}, r.bottom_right = {c2, 0}; break;
        default: r.top_left = {c1, r1}, r.bottom_right = {c2, r2};
    }
    return r;
}

Range single_cell(Rng& rng, const Workbook& wb) {
    Range r = small_range(rng, wb);
    r.open_bottom = false;
    r.bottom_right = r.top_left;
    return r;
}

Range single_column(Rng& rng, const Workbook& wb) {
    Range r = small_range(rng, wb);
    r.bottom_right.col = r.top_left.col;
    if (!r.open_bottom) r.bottom_right.row = std::max(r.bottom_right.row, r.top_left.row);
    return r;
}

// Conditions built only from patterns and literals the dialect accepts.
Condition valid_condition(Rng& rng, int depth) {
    for (;;) {
        Condition c = random_condition(rng, depth);
        bool ok = true;
        std::vector<const Condition*> stack = {&c};
        while (!stack.empty()) {
            const Condition* x = stack.back();
            stack.pop_back();
            if (x->kind == Condition::Kind::Matches &&
                std::find(kPatterns.begin(), kPatterns.end(), x->pattern) == kPatterns.end())
                ok = false;
            for (const auto& ch : x->children) stack.push_back(&ch);
        }
        if (ok) return c;
    }
}

}  // namespace

Action random_valid_action(Rng& rng, const Workbook& wb) {
    static const std::array<std::string, 2> kOrders = {"ASC", "DESC"};
    static const std::array<std::string, 5> kFns = {"SUM", "AVG", "MIN", "MAX", "COUNT"};
    for (;;) {
        Action a;
        a.op = kAllVerbs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(kAllVerbs.size()) - 1))];
        switch (a.op) {
            case Verb::SELECT:
            case Verb::DELETE: a.args = {small_range(rng, wb)}; break;
            case Verb::DELETE_ROWS: a.args = {single_column(rng, wb)}; break;
            case Verb::DELETE_COLS: a.args = {small_range(rng, wb)}; break;
            case Verb::SET: {
                CellValue v = random_cell(rng);
                if (std::holds_alternative<Formula>(v)) v = Text{std::get<Formula>(v).source};
                if (chance(rng, 0.05)) v = Text{""};
                a.args = {small_range(rng, wb), Literal{v}};
                break;
            }
            case Verb::INSERT_ROWS:
            case Verb::INSERT_COLS:
                a.args = {Literal{static_cast<double>(uniform(rng, 1, 25))}};
                if (chance(rng, 0.6)) a.args.push_back(Named{"count", static_cast<double>(uniform(rng, 1, 3))});
                break;
            case Verb::SORT: {
                Range r = small_range(rng, wb);
                a.args = {r, Named{"key", Text{column_letters(static_cast<std::uint32_t>(
                                                  uniform(rng, static_cast<int>(r.top_left.col), static_cast<int>(r.bottom_right.col))))}}};
                if (chance(rng, 0.6)) a.args.push_back(Named{"order", Text{kOrders[static_cast<std::size_t>(uniform(rng, 0, 1))]}});
                break;
            }
            case Verb::COPY: a.args = {small_range(rng, wb), single_cell(rng, wb)}; break;
            case Verb::AGGREGATE:
                a.args = {small_range(rng, wb), single_cell(rng, wb), Named{"fn", Text{kFns[static_cast<std::size_t>(uniform(rng, 0, 4))]}}};
                break;
        }
        const Signature& sig = signature(a.op);
        if (sig.cond_required || (sig.conditionable && chance(rng, 0.6))) a.cond = valid_condition(rng, uniform(rng, 0, 2));
        if (validate_static(a, wb).valid) return a;
    }
}

std::string random_fuzz_input(Rng& rng, std::size_t max_len) {
    std::size_t n = static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(max_len)));
    std::string out;
    if (chance(rng, 0.4)) {
        while (out.size() < n) out += static_cast<char>(uniform(rng, 0, 255));
        return out;
    }
    static const std::array<std::string, 40> kTokens = {
        "SELECT", "SET",   "DELETE", "DELETE_ROWS", "INSERT_ROWS", "SORT",  "COPY", "AGGREGATE", "(",    ")",
        ",",      ";",     "WHERE",  "AND",         "OR",          "NOT",   "VALUE", "MATCHES",  "ISEMPTY", "=",
        "<=",     "!=",    ">",      "\"",          "\"abc\"",     "\\",    "E:E",  "A1:B3",     "'x'!",  "Data!",
        "key=",   "fn=",   "SUM",    "12",          "-3.5e2",      "2024-02-30", "1e999", " ",   "\n",    "(((("};
    while (out.size() < n) out += pick(rng, kTokens);
    if (out.size() > max_len) out.resize(max_len);
    return out;
}

}  // namespace sheetmind::testkit
