#include "sheetmind/address.hpp"

#include "sheetmind/error.hpp"

namespace sheetmind {

namespace {

bool is_upper(char c) { return c >= 'A' && c <= 'Z'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word_char(char c) {
    return is_upper(c) || is_digit(c) || (c >= 'a' && c <= 'z') || c == '_';
}

char lower(char c) { return c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c; }

// Offending token: the run of word characters (plus ':') around `from`.
std::string token_at(std::string_view text, std::size_t from) {
    std::size_t end = from;
    while (end < text.size() && (is_word_char(text[end]) || text[end] == ':')) ++end;
    if (end == from && from < text.size()) ++end;
    return std::string(text.substr(from, end - from));
}

struct ColRow {
    std::uint32_t col = 0;
    std::optional<std::uint32_t> row;
};

ColRow scan_col_row(std::string_view text, std::size_t& pos, std::size_t token_start) {
    std::size_t start = pos;
    while (pos < text.size() && is_upper(text[pos])) ++pos;
    auto col = column_from_letters(text.substr(start, pos - start));
    if (!col) {
        throw ParseError("bad column letters in '" + token_at(text, token_start) + "'", start,
                         "column letters A..XFD");
    }
    ColRow out{*col, std::nullopt};
    std::size_t digits = pos;
    std::uint64_t row = 0;
    while (pos < text.size() && is_digit(text[pos])) {
        row = row * 10 + static_cast<std::uint64_t>(text[pos] - '0');
        ++pos;
        if (row > kParseMaxRows) {
            throw ParseError("row out of range in '" + token_at(text, token_start) + "'", digits);
        }
    }
    if (pos != digits) {
        if (row == 0) throw ParseError("row 0 in '" + token_at(text, token_start) + "'", digits);
        out.row = static_cast<std::uint32_t>(row);
    }
    return out;
}

}  // namespace

std::optional<std::uint32_t> column_from_letters(std::string_view letters) {
    if (letters.empty() || letters.size() > 3) return std::nullopt;
    std::uint32_t col = 0;
    for (char c : letters) {
        if (!is_upper(c)) return std::nullopt;
        col = col * 26 + static_cast<std::uint32_t>(c - 'A' + 1);
    }
    if (col > kParseMaxCols) return std::nullopt;
    return col;
}

std::string column_letters(std::uint32_t col) {
    std::string out;
    while (col > 0) {
        std::uint32_t rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::string format_address(CellAddress a) { return column_letters(a.col) + std::to_string(a.row); }

bool is_bare_sheet_name(std::string_view name) {
    if (name.empty()) return false;
    char first = name.front();
    if (!(is_upper(first) || (first >= 'a' && first <= 'z') || first == '_')) return false;
    for (char c : name)
        if (!is_word_char(c)) return false;
    return true;
}

bool is_valid_sheet_name(std::string_view name) {
    return !name.empty() && name.find('!') == std::string_view::npos &&
           name.find(':') == std::string_view::npos;
}

bool iequals(std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (lower(a[i]) != lower(b[i])) return false;
    return true;
}

Range scan_range(std::string_view text, std::size_t& pos) {
    Range r;

    if (pos < text.size() && text[pos] == '\'') {
        std::string name;
        std::size_t p = pos + 1;
        bool closed = false;
        while (p < text.size()) {
            if (text[p] == '\'') {
                if (p + 1 < text.size() && text[p + 1] == '\'') {
                    name += '\'';
                    p += 2;
                    continue;
                }
                closed = true;
                ++p;
                break;
            }
            name += text[p++];
        }
        if (!closed) throw ParseError("unterminated quoted sheet name", pos, "'");
        if (!is_valid_sheet_name(name)) throw ParseError("invalid sheet name '" + name + "'", pos);
        if (p >= text.size() || text[p] != '!') throw ParseError("expected '!' after sheet name", p, "!");
        r.sheet = std::move(name);
        pos = p + 1;
    } else {
        std::size_t p = pos;
        while (p < text.size() && is_word_char(text[p])) ++p;
        if (p < text.size() && text[p] == '!') {
            auto name = text.substr(pos, p - pos);
            if (!is_bare_sheet_name(name)) {
                throw ParseError("invalid sheet name '" + std::string(name) + "'", pos);
            }
            r.sheet = std::string(name);
            pos = p + 1;
        }
    }

    const std::size_t cells_start = pos;
    ColRow first = scan_col_row(text, pos, cells_start);
    r.top_left.col = first.col;
    bool has_colon = pos < text.size() && text[pos] == ':';
    if (!has_colon) {
        if (!first.row) {
            throw ParseError("column reference '" + token_at(text, cells_start) + "' needs a row or ':'",
                             pos, "row number or ':'");
        }
        r.top_left.row = *first.row;
        r.bottom_right = r.top_left;
        return r;
    }
    ++pos;
    ColRow second = scan_col_row(text, pos, cells_start);
    if (second.col < first.col) {
        throw ParseError("reversed corners in '" + token_at(text, cells_start) + "'", cells_start);
    }
    r.bottom_right.col = second.col;
    if (!first.row) {
        if (second.row) {
            throw ParseError("mixed column/cell corners in '" + token_at(text, cells_start) + "'",
                             cells_start);
        }
        r.top_left.row = 1;
        r.bottom_right.row = 0;
        r.open_bottom = true;
    } else if (!second.row) {
        r.top_left.row = *first.row;
        r.bottom_right.row = 0;
        r.open_bottom = true;
    } else {
        if (*second.row < *first.row) {
            throw ParseError("reversed corners in '" + token_at(text, cells_start) + "'", cells_start);
        }
        r.top_left.row = *first.row;
        r.bottom_right.row = *second.row;
    }
    return r;
}

Range parse_range(std::string_view text) {
    if (text.empty()) throw ParseError("empty range", 0, "A1 reference");
    std::size_t pos = 0;
    Range r = scan_range(text, pos);
    if (pos != text.size()) {
        throw ParseError("unexpected '" + std::string(text.substr(pos)) + "' after range", pos);
    }
    return r;
}

std::string format_range(const Range& r) {
    std::string out;
    if (r.sheet) {
        if (is_bare_sheet_name(*r.sheet)) {
            out += *r.sheet;
        } else {
            out += '\'';
            for (char c : *r.sheet) {
                out += c;
                if (c == '\'') out += '\'';
            }
            out += '\'';
        }
        out += '!';
    }
    if (r.open_bottom) {
        out += column_letters(r.top_left.col);
        if (r.top_left.row != 1) out += std::to_string(r.top_left.row);
        out += ':';
        out += column_letters(r.bottom_right.col);
        return out;
    }
    out += format_address(r.top_left);
    if (r.bottom_right != r.top_left) {
        out += ':';
        out += format_address(r.bottom_right);
    }
    return out;
}

}  // namespace sheetmind
