#include "sheetmind/cell.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "sheetmind/error.hpp"

namespace sheetmind {

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }

int two_digits(std::string_view s, std::size_t at) { return (s[at] - '0') * 10 + (s[at + 1] - '0'); }

int type_rank(const CellValue& v) {
    struct Rank {
        int operator()(const Empty&) const { return 5; }
        int operator()(double) const { return 0; }
        int operator()(const Date&) const { return 1; }
        int operator()(const Text&) const { return 2; }
        int operator()(const Formula&) const { return 3; }
        int operator()(bool) const { return 4; }
    };
    return std::visit(Rank{}, v);
}

std::strong_ordering bytewise(std::string_view a, std::string_view b) {
    int c = a.compare(b);
    if (c < 0) return std::strong_ordering::less;
    if (c > 0) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
}

}  // namespace

bool is_valid_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
        if (!is_digit(s[i])) return false;
    int year = two_digits(s, 0) * 100 + two_digits(s, 2);
    int month = two_digits(s, 5);
    int day = two_digits(s, 8);
    if (year < 1 || month < 1 || month > 12 || day < 1) return false;
    static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    bool leap = (year % 4 == 0 && year % 100 != 0) || year % 400 == 0;
    int limit = kDays[month - 1] + (month == 2 && leap ? 1 : 0);
    return day <= limit;
}

Date make_date(std::string_view text) {
    if (!is_valid_date(text)) throw Error("invalid date: " + std::string(text));
    return Date{std::string(text)};
}

std::string format_number(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_number(std::string_view text) {
    if (text.empty()) return std::nullopt;
    // from_chars accepts "inf"/"nan" and hex-free forms only; guard the
    // leading character so words never parse as numbers.
    char first = text.front();
    if (!(is_digit(first) || first == '-' || first == '.')) return std::nullopt;
    if (first == '-' && (text.size() < 2 || !(is_digit(text[1]) || text[1] == '.')))
        return std::nullopt;
    double out = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), out);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    if (!std::isfinite(out)) return std::nullopt;
    return out;
}

CellValue infer_cell(std::string_view text) {
    if (text.empty()) return Empty{};
    if (text.front() == '=') return Formula{std::string(text)};
    if (is_valid_date(text)) return Date{std::string(text)};
    if (text.size() == 4 || text.size() == 5) {
        std::string lower;
        for (char c : text) lower += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
        if (lower == "true") return true;
        if (lower == "false") return false;
    }
    if (auto n = parse_number(text)) return *n;
    return Text{std::string(text)};
}

CellValue normalize_entered(CellValue v) {
    if (auto* t = std::get_if<Text>(&v)) {
        if (t->value.empty()) return Empty{};
        if (t->value.front() == '=') return Formula{std::move(t->value)};
    } else if (auto* d = std::get_if<double>(&v)) {
        if (!std::isfinite(*d)) throw Error("numbers must be finite");
    } else if (auto* date = std::get_if<Date>(&v)) {
        if (!is_valid_date(date->iso)) throw Error("invalid date: " + date->iso);
    } else if (auto* f = std::get_if<Formula>(&v)) {
        if (f->source.empty() || f->source.front() != '=')
            throw Error("formula must start with '='");
    }
    return v;
}

std::string render(const CellValue& v) {
    struct Render {
        std::string operator()(const Empty&) const { return {}; }
        std::string operator()(const Text& t) const { return t.value; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(bool b) const { return b ? "TRUE" : "FALSE"; }
        std::string operator()(const Date& d) const { return d.iso; }
        std::string operator()(const Formula& f) const { return f.source; }
    };
    return std::visit(Render{}, v);
}

char type_tag(const CellValue& v) {
    static constexpr char kTags[] = {'e', 's', 'n', 'b', 'd', 'f'};
    return kTags[v.index()];
}

std::string describe(const CellValue& v) {
    switch (v.index()) {
        case 0: return "Empty";
        case 1: return "Text \"" + std::get<Text>(v).value + "\"";
        case 2: return "Number " + format_number(std::get<double>(v));
        case 3: return std::string("Bool ") + (std::get<bool>(v) ? "TRUE" : "FALSE");
        case 4: return "Date " + std::get<Date>(v).iso;
        default: return "Formula " + std::get<Formula>(v).source;
    }
}

std::optional<std::strong_ordering> compare_same_type(const CellValue& a, const CellValue& b) {
    if (a.index() != b.index() || is_empty(a)) return std::nullopt;
    if (auto* x = std::get_if<double>(&a)) {
        double y = std::get<double>(b);
        if (*x < y) return std::strong_ordering::less;
        if (*x > y) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    if (auto* x = std::get_if<bool>(&a)) return static_cast<int>(*x) <=> static_cast<int>(std::get<bool>(b));
    // Text, Date (ISO text orders chronologically) and Formula compare bytewise.
    return bytewise(render(a), render(b));
}

std::strong_ordering sort_order(const CellValue& a, const CellValue& b) {
    int ra = type_rank(a), rb = type_rank(b);
    if (ra != rb) return ra <=> rb;
    if (is_empty(a)) return std::strong_ordering::equal;
    return *compare_same_type(a, b);
}

}  // namespace sheetmind
