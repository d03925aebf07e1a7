#include "sheetmind/validate.hpp"

#include <cmath>

#include "sheetmind/regex_dialect.hpp"

namespace sheetmind {

namespace {

using Code = Verdict::Code;

std::optional<Verdict> check_condition(const Condition& c) {
    using K = Condition::Kind;
    switch (c.kind) {
        case K::And:
        case K::Or:
            if (c.children.size() < 2) return Verdict::invalid(Code::arity, "AND/OR needs at least two operands");
            break;
        case K::Not:
            if (c.children.size() != 1) return Verdict::invalid(Code::arity, "NOT takes exactly one operand");
            break;
        case K::Cmp:
            if (is_empty(c.literal) || std::holds_alternative<Formula>(c.literal)) {
                return Verdict::invalid(Code::arity, "comparison literal must be text, number, bool or date");
            }
            break;
        case K::Matches:
            if (auto why = regex_error(c.pattern)) return Verdict::invalid(Code::regex, *why);
            break;
        case K::IsEmpty: break;
    }
    for (const auto& child : c.children)
        if (auto v = check_condition(child)) return v;
    return std::nullopt;
}

std::optional<Verdict> check_range(const Range& r, const Workbook& wb) {
    if (r.sheet && !wb.find(*r.sheet)) return Verdict::invalid(Code::bounds, "unknown sheet '" + *r.sheet + "'");
    bool rows_ok = r.top_left.row >= 1 && r.top_left.row <= kMaxRows &&
                   (r.open_bottom || (r.bottom_right.row >= r.top_left.row && r.bottom_right.row <= kMaxRows));
    bool cols_ok = r.top_left.col >= 1 && r.bottom_right.col >= r.top_left.col && r.bottom_right.col <= kMaxCols;
    if (!rows_ok || !cols_ok) {
        return Verdict::invalid(Code::bounds, "range " + format_range(r) + " lies outside the " +
                                                  std::to_string(kMaxRows) + "x" + std::to_string(kMaxCols) + " grid");
    }
    return std::nullopt;
}

bool is_positive_integer(double x) { return x >= 1 && std::floor(x) == x; }

const Sheet& sheet_of(const Range& r, const Workbook& wb) { return wb.sheet_for(r.sheet); }

}  // namespace

Verdict validate_static(const Action& a, const Workbook& wb) {
    auto verb_index = static_cast<std::size_t>(a.op);
    if (verb_index >= kAllVerbs.size()) return Verdict::invalid(Code::verb, "unknown verb");
    if (auto problem = check_signature(a)) return Verdict::invalid(Code::arity, *problem);
    if (a.cond) {
        if (auto v = check_condition(*a.cond)) return *v;
    }
    for (const auto& arg : a.args) {
        if (const auto* r = std::get_if<Range>(&arg)) {
            if (auto v = check_range(*r, wb)) return *v;
        }
    }

    auto pos = a.positional();
    switch (a.op) {
        case Verb::DELETE_ROWS: {
            const auto& r = std::get<Range>(*pos[0]);
            if (r.width() != 1) return Verdict::invalid(Code::semantic, "DELETE_ROWS needs a single-column range");
            break;
        }
        case Verb::INSERT_ROWS:
        case Verb::INSERT_COLS: {
            bool rows = a.op == Verb::INSERT_ROWS;
            double at = std::get<double>(std::get<Literal>(*pos[0]).value);
            double limit = rows ? kMaxRows : kMaxCols;
            if (!is_positive_integer(at)) return Verdict::invalid(Code::semantic, "insert position must be a positive integer");
            if (at > limit) return Verdict::invalid(Code::bounds, "insert position past the grid");
            if (const Named* n = a.named("count")) {
                double count = std::get<double>(n->value);
                if (!is_positive_integer(count)) return Verdict::invalid(Code::semantic, "count must be a positive integer");
                if (count > limit) return Verdict::invalid(Code::bounds, "count larger than the grid");
            }
            break;
        }
        case Verb::SORT: {
            const auto& r = std::get<Range>(*pos[0]);
            auto key = column_from_letters(std::get<Text>(a.named("key")->value).value);
            if (!key || *key < r.top_left.col || *key > r.bottom_right.col) {
                return Verdict::invalid(Code::semantic, "sort key column " +
                                                            std::get<Text>(a.named("key")->value).value +
                                                            " is outside " + format_range(r));
            }
            break;
        }
        case Verb::COPY:
        case Verb::AGGREGATE: {
            const auto& src = std::get<Range>(*pos[0]);
            const auto& dst = std::get<Range>(*pos[1]);
            if (!dst.is_single_cell()) {
                return Verdict::invalid(Code::semantic, std::string(to_string(a.op)) + " destination must be a single cell");
            }
            if (a.op == Verb::COPY && !src.open_bottom) {
                std::uint64_t last_row = dst.top_left.row + (src.bottom_right.row - src.top_left.row);
                std::uint64_t last_col = dst.top_left.col + (src.bottom_right.col - src.top_left.col);
                if (last_row > kMaxRows || last_col > kMaxCols) {
                    return Verdict::invalid(Code::bounds, "COPY destination runs past the grid");
                }
                if (&sheet_of(src, wb) == &sheet_of(dst, wb) && dst.top_left.row <= src.bottom_right.row &&
                    last_row >= src.top_left.row && dst.top_left.col <= src.bottom_right.col &&
                    last_col >= src.top_left.col) {
                    return Verdict::invalid(Code::semantic, "COPY source and destination overlap");
                }
            }
            break;
        }
        default: break;
    }
    return Verdict::ok();
}

}  // namespace sheetmind
