#include "sheetmind/exec.hpp"

#include <algorithm>
#include <cmath>

#include "sheetmind/validate.hpp"

namespace sheetmind {

namespace {

struct Rect {
    Sheet* sheet;
    std::uint32_t c1, c2, r1, r2;

    bool empty() const { return r2 < r1; }
};

Rect resolve(Workbook& wb, const Range& r) {
    Sheet& s = wb.sheet_for(r.sheet);
    std::uint32_t bottom = r.open_bottom ? s.used_rows() : r.bottom_right.row;
    return {&s, r.top_left.col, r.bottom_right.col, r.top_left.row, bottom};
}

const Range& range_arg(const Action& a, std::size_t i) { return std::get<Range>(*a.positional()[i]); }

double number_arg(const Action& a, std::size_t i) {
    return std::get<double>(std::get<Literal>(*a.positional()[i]).value);
}

std::string word_arg(const Action& a, std::string_view key, std::string_view fallback) {
    const Named* n = a.named(key);
    return n ? std::get<Text>(n->value).value : std::string(fallback);
}

class Interpreter {
public:
    Interpreter(Workbook& wb, const Action& a) : wb_(wb), a_(a) {}

    std::optional<std::vector<SelectedCell>> run() {
        switch (a_.op) {
            case Verb::SELECT: return select();
            case Verb::SET: fill(std::get<Literal>(*a_.positional()[1]).value); break;
            case Verb::DELETE: fill(Empty{}); break;
            case Verb::DELETE_ROWS: delete_rows(); break;
            case Verb::INSERT_ROWS:
                wb_.active_sheet().insert_rows(static_cast<std::uint32_t>(number_arg(a_, 0)), count());
                break;
            case Verb::INSERT_COLS:
                wb_.active_sheet().insert_cols(static_cast<std::uint32_t>(number_arg(a_, 0)), count());
                break;
            case Verb::DELETE_COLS: {
                Rect r = resolve(wb_, range_arg(a_, 0));
                r.sheet->delete_cols(r.c1, r.c2 - r.c1 + 1);
                break;
            }
            case Verb::SORT: sort(); break;
            case Verb::COPY: copy(); break;
            case Verb::AGGREGATE: aggregate(); break;
        }
        return std::nullopt;
    }

private:
    bool matches(const CellValue& v) { return !a_.cond || eval_(*a_.cond, v); }

    std::uint32_t count() {
        const Named* n = a_.named("count");
        return n ? static_cast<std::uint32_t>(std::get<double>(n->value)) : 1;
    }

    std::vector<SelectedCell> select() {
        std::vector<SelectedCell> out;
        Rect r = resolve(wb_, range_arg(a_, 0));
        for (std::uint32_t row = r.r1; row <= r.r2 && !r.empty(); ++row)
            for (std::uint32_t col = r.c1; col <= r.c2; ++col) {
                const CellValue& v = r.sheet->get({col, row});
                if (matches(v)) out.push_back({r.sheet->name(), {col, row}, v});
            }
        return out;
    }

    void fill(const CellValue& value) {
        Rect r = resolve(wb_, range_arg(a_, 0));
        for (std::uint32_t row = r.r1; row <= r.r2 && !r.empty(); ++row)
            for (std::uint32_t col = r.c1; col <= r.c2; ++col)
                if (matches(r.sheet->get({col, row}))) r.sheet->set({col, row}, value);
    }

    void delete_rows() {
        Rect r = resolve(wb_, range_arg(a_, 0));
        if (r.empty()) return;
        for (std::uint32_t row = r.r2; row >= r.r1; --row) {
            if (matches(r.sheet->get({r.c1, row}))) r.sheet->delete_rows(row, 1);
            if (row == 1) break;
        }
    }

    void sort() {
        Rect r = resolve(wb_, range_arg(a_, 0));
        if (r.empty()) return;
        std::uint32_t key = *column_from_letters(word_arg(a_, "key", "")) - r.c1;
        bool descending = word_arg(a_, "order", "ASC") == "DESC";
        std::vector<std::vector<CellValue>> rows;
        for (std::uint32_t row = r.r1; row <= r.r2; ++row) {
            auto& line = rows.emplace_back();
            for (std::uint32_t col = r.c1; col <= r.c2; ++col) line.push_back(r.sheet->get({col, row}));
        }
        std::stable_sort(rows.begin(), rows.end(), [&](const auto& x, const auto& y) {
            const CellValue& a = x[key];
            const CellValue& b = y[key];
            if (is_empty(a) || is_empty(b)) return !is_empty(a) && is_empty(b);
            return descending ? sort_order(b, a) < 0 : sort_order(a, b) < 0;
        });
        for (std::uint32_t i = 0; i < rows.size(); ++i)
            for (std::uint32_t j = 0; j < rows[i].size(); ++j) r.sheet->set({r.c1 + j, r.r1 + i}, rows[i][j]);
    }

    void copy() {
        Rect src = resolve(wb_, range_arg(a_, 0));
        const Range& dst_range = range_arg(a_, 1);
        Sheet& dst = wb_.sheet_for(dst_range.sheet);
        if (src.empty()) return;
        CellAddress at = dst_range.top_left;
        std::uint32_t height = src.r2 - src.r1 + 1, width = src.c2 - src.c1 + 1;
        if (static_cast<std::uint64_t>(at.row) + height - 1 > kMaxRows ||
            static_cast<std::uint64_t>(at.col) + width - 1 > kMaxCols) {
            throw BoundsError("COPY destination runs past the grid");
        }
        if (&dst == src.sheet && at.row <= src.r2 && at.row + height - 1 >= src.r1 && at.col <= src.c2 &&
            at.col + width - 1 >= src.c1) {
            throw ExecutionError("COPY source and destination overlap");
        }
        std::vector<CellValue> block;
        for (std::uint32_t row = src.r1; row <= src.r2; ++row)
            for (std::uint32_t col = src.c1; col <= src.c2; ++col) block.push_back(src.sheet->get({col, row}));
        std::size_t i = 0;
        for (std::uint32_t dr = 0; dr < height; ++dr)
            for (std::uint32_t dc = 0; dc < width; ++dc) dst.set({at.col + dc, at.row + dr}, block[i++]);
    }

    void aggregate() {
        Rect src = resolve(wb_, range_arg(a_, 0));
        const Range& dst_range = range_arg(a_, 1);
        std::string fn = word_arg(a_, "fn", "SUM");
        double sum = 0, lo = 0, hi = 0;
        std::size_t numbers = 0, non_empty = 0;
        for (std::uint32_t row = src.r1; row <= src.r2 && !src.empty(); ++row)
            for (std::uint32_t col = src.c1; col <= src.c2; ++col) {
                const CellValue& v = src.sheet->get({col, row});
                if (!matches(v)) continue;
                if (!is_empty(v)) ++non_empty;
                if (const auto* x = std::get_if<double>(&v)) {
                    sum += *x;
                    lo = numbers == 0 ? *x : std::min(lo, *x);
                    hi = numbers == 0 ? *x : std::max(hi, *x);
                    ++numbers;
                }
            }
        CellValue result;
        if (fn == "SUM") {
            result = sum;
        } else if (fn == "COUNT") {
            result = static_cast<double>(non_empty);
        } else if (numbers > 0) {
            result = fn == "AVG" ? sum / static_cast<double>(numbers) : fn == "MIN" ? lo : hi;
        }
        if (const auto* x = std::get_if<double>(&result); x && !std::isfinite(*x)) {
            throw ExecutionError("AGGREGATE result is not finite");
        }
        wb_.sheet_for(dst_range.sheet).set(dst_range.top_left, result);
    }

    Workbook& wb_;
    const Action& a_;
    ConditionEvaluator eval_;
};

}  // namespace

bool ConditionEvaluator::operator()(const Condition& c, const CellValue& v) {
    using K = Condition::Kind;
    switch (c.kind) {
        case K::And:
            for (const auto& child : c.children)
                if (!(*this)(child, v)) return false;
            return true;
        case K::Or:
            for (const auto& child : c.children)
                if ((*this)(child, v)) return true;
            return false;
        case K::Not: return !c.children.empty() && !(*this)(c.children.front(), v);
        case K::IsEmpty: return is_empty(v);
        case K::Cmp: {
            auto ord = compare_same_type(v, c.literal);
            if (!ord) return false;
            switch (c.op) {
                case CmpOp::eq: return *ord == 0;
                case CmpOp::ne: return *ord != 0;
                case CmpOp::lt: return *ord < 0;
                case CmpOp::le: return *ord <= 0;
                case CmpOp::gt: return *ord > 0;
                case CmpOp::ge: return *ord >= 0;
            }
            return false;
        }
        case K::Matches: {
            auto it = patterns_.find(c.pattern);
            if (it == patterns_.end()) {
                std::optional<Pattern> compiled;
                try {
                    compiled = Pattern::compile(c.pattern);
                } catch (const Error&) {
                }
                it = patterns_.emplace(c.pattern, std::move(compiled)).first;
            }
            return it->second && it->second->search(render(v));
        }
    }
    return false;
}

bool eval_condition(const Condition& c, const CellValue& v) {
    ConditionEvaluator eval;
    return eval(c, v);
}

ExecutionResult execute(Workbook& wb, const Action& a) {
    Verdict verdict = validate_static(a, wb);
    if (!verdict.valid) throw SemanticViolation("action fails validation: " + verdict.reason);

    SheetSnapshot before = snapshot(wb);
    ExecutionResult result;
    try {
        result.selection = Interpreter(wb, a).run();
    } catch (...) {
        wb = *before.state;
        throw;
    }
    SheetSnapshot after = snapshot(wb);
    result.diff = diff(before, after);
    result.mutated = !result.diff.empty();
    if (a.op == Verb::SELECT && !result.selection) result.selection.emplace();
    return result;
}

ScriptExecution execute_script(Workbook& wb, const std::vector<Action>& actions) {
    ScriptExecution out;
    for (std::size_t i = 0; i < actions.size(); ++i) {
        try {
            out.results.push_back(execute(wb, actions[i]));
        } catch (const Error& e) {
            out.failed_index = i;
            out.error = "action " + std::to_string(i) + ": " + e.what();
            break;
        }
    }
    return out;
}

}  // namespace sheetmind
