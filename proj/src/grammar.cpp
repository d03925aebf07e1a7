#include "sheetmind/grammar.hpp"

namespace sheetmind {

const std::string_view kActionGrammar = R"EBNF(script   := action { ";" action }
action   := VERB "(" [ arg { "," arg } ] ")" [ "WHERE" cond ]
arg      := range | literal | IDENT "=" literal
range    := [ SHEETNAME "!" ] A1 [ ":" A1COL? A1 | ":" COLONLY ]
literal  := STRING | NUMBER | BOOL | DATE
cond     := orexpr
orexpr   := andexpr { "OR" andexpr }
andexpr  := notexpr { "AND" notexpr }
notexpr  := [ "NOT" ] primary
primary  := "(" cond ")" | "VALUE" CMP literal
          | "MATCHES" "(" STRING ")" | "ISEMPTY"
CMP      := "=" | "!=" | "<" | "<=" | ">" | ">=")EBNF";

std::string verb_reference() {
    return "SELECT(range) [WHERE cond]                      -- read cells, no change\n"
           "SET(range, literal) [WHERE cond]                -- write literal into every (matching) cell\n"
           "DELETE(range) [WHERE cond]                      -- clear every (matching) cell\n"
           "DELETE_ROWS(columnRange) WHERE cond             -- remove whole rows whose cell in the column matches\n"
           "INSERT_ROWS(at, count=n)                        -- insert n empty rows before row `at`\n"
           "INSERT_COLS(at, count=n)                        -- insert n empty columns before column number `at`\n"
           "DELETE_COLS(columnRange)                        -- remove whole columns\n"
           "SORT(range, key=COLUMN, order=ASC|DESC)         -- sort rows of range by a column inside it\n"
           "COPY(sourceRange, destinationCell)              -- copy a block; destination is its top-left cell\n"
           "AGGREGATE(sourceRange, destinationCell, fn=SUM|AVG|MIN|MAX|COUNT) [WHERE cond]\n"
           "Ranges: A1, B2:C4, E:E (whole column), E2:E (column from row 2), Data!A1:B3 (other sheet).\n"
           "Literals: \"text\", 42, -1.5, TRUE, FALSE, 2024-01-15.\n";
}

namespace {

constexpr int kMaxDepth = 256;

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_word_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_word_char(char c) { return is_word_start(c) || is_digit(c); }

bool is_identifier(std::string_view s) {
    if (s.empty() || !is_word_start(s.front())) return false;
    for (char c : s)
        if (!is_word_char(c)) return false;
    return true;
}

std::string verb_list() {
    std::string out;
    for (Verb v : kAllVerbs) out += (out.empty() ? "" : "|") + std::string(to_string(v));
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view text) : s_(text) {}

    bool at_end() {
        skip_ws();
        return pos_ >= s_.size();
    }

    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }

    bool consume(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }

    void expect(char c) {
        if (!consume(c)) fail(std::string("expected '") + c + "'", std::string(1, c));
    }

    [[noreturn]] void fail(const std::string& message, const std::string& expected) const {
        throw ParseError(message + " at position " + std::to_string(pos_) + found(), pos_, expected);
    }

    Action action() {
        skip_ws();
        const std::size_t verb_pos = pos_;
        std::string word = read_word();
        if (word.empty()) fail("expected an action verb", verb_list());
        auto verb = verb_from_string(word);
        if (!verb) {
            throw UnknownVerbError("unknown verb '" + word + "' at position " + std::to_string(verb_pos), verb_pos,
                                   verb_list());
        }
        Action a;
        a.op = *verb;
        expect('(');
        if (!consume(')')) {
            do {
                a.args.push_back(arg());
            } while (consume(','));
            if (!consume(')')) fail("expected ',' or ')'", ", )");
        }
        if (peek_keyword("WHERE")) {
            read_word();
            a.cond = condition(0);
        }
        if (auto problem = check_signature(a)) {
            throw ArityError(*problem + " (action starting at position " + std::to_string(verb_pos) + ")", verb_pos,
                             "arguments matching the " + word + " signature");
        }
        return a;
    }

    std::size_t pos() const { return pos_; }

private:
    std::string found() const {
        if (pos_ >= s_.size()) return ", found end of input";
        std::size_t n = std::min<std::size_t>(12, s_.size() - pos_);
        return ", found '" + std::string(s_.substr(pos_, n)) + "'";
    }

    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    std::string read_word() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < s_.size() && is_word_start(s_[pos_])) {
            while (pos_ < s_.size() && is_word_char(s_[pos_])) ++pos_;
        }
        return std::string(s_.substr(start, pos_ - start));
    }

    bool peek_keyword(std::string_view kw) {
        skip_ws();
        std::size_t save = pos_;
        std::string w = read_word();
        pos_ = save;
        return w == kw;
    }

    Arg arg() {
        char c = peek();
        if (c == '"') return Literal{Text{string_literal()}};
        if (is_digit(c) || c == '-' || c == '.') return Literal{number_or_date()};
        if (c == '\'') return range();
        if (is_word_start(c)) {
            const std::size_t start = pos_;
            std::string word = read_word();
            const std::size_t after = pos_;
            if (peek() == '=' && (pos_ + 1 >= s_.size() || s_[pos_ + 1] != '=')) {
                ++pos_;
                return Named{std::move(word), named_value()};
            }
            pos_ = after;
            bool sheet_prefix = pos_ < s_.size() && s_[pos_] == '!';
            if (!sheet_prefix && word == "TRUE") return Literal{true};
            if (!sheet_prefix && word == "FALSE") return Literal{false};
            pos_ = start;
            return range();
        }
        fail("expected an argument", "range, literal or key=value");
    }

    Range range() {
        skip_ws();
        try {
            return scan_range(s_, pos_);
        } catch (const ParseError& e) {
            throw ParseError(std::string(e.what()) + " (in argument list)", e.position(), e.expected());
        }
    }

    CellValue named_value() {
        char c = peek();
        if (c == '"') return Text{string_literal()};
        if (is_digit(c) || c == '-' || c == '.') return number_or_date();
        std::string word = read_word();
        if (word.empty()) fail("expected a value after '='", "literal or word");
        if (word == "TRUE") return true;
        if (word == "FALSE") return false;
        return Text{std::move(word)};
    }

    CellValue literal() {
        char c = peek();
        if (c == '"') return Text{string_literal()};
        if (is_digit(c) || c == '-' || c == '.') return number_or_date();
        std::size_t save = pos_;
        std::string word = read_word();
        if (word == "TRUE") return true;
        if (word == "FALSE") return false;
        pos_ = save;
        fail("expected a literal", "STRING NUMBER BOOL DATE");
    }

    std::string string_literal() {
        skip_ws();
        const std::size_t open = pos_;
        ++pos_;  // opening quote
        std::string out;
        while (pos_ < s_.size()) {
            char c = s_[pos_];
            if (c == '"') {
                ++pos_;
                return out;
            }
            if (c == '\\' && pos_ + 1 < s_.size() && (s_[pos_ + 1] == '"' || s_[pos_ + 1] == '\\')) {
                out += s_[pos_ + 1];
                pos_ += 2;
                continue;
            }
            out += c;
            ++pos_;
        }
        pos_ = open;
        fail("unterminated string", "\"");
    }

    CellValue number_or_date() {
        skip_ws();
        const std::size_t start = pos_;
        auto digit_at = [&](std::size_t i) { return i < s_.size() && is_digit(s_[i]); };
        if (digit_at(start) && digit_at(start + 1) && digit_at(start + 2) && digit_at(start + 3) &&
            start + 4 < s_.size() && s_[start + 4] == '-' && digit_at(start + 5) && digit_at(start + 6) &&
            start + 7 < s_.size() && s_[start + 7] == '-' && digit_at(start + 8) && digit_at(start + 9) &&
            !(start + 10 < s_.size() && is_word_char(s_[start + 10]))) {
            auto text = s_.substr(start, 10);
            if (!is_valid_date(text)) fail("invalid date '" + std::string(text) + "'", "valid YYYY-MM-DD");
            pos_ = start + 10;
            return Date{std::string(text)};
        }
        std::size_t p = start;
        if (p < s_.size() && s_[p] == '-') ++p;
        std::size_t mantissa_digits = 0;
        while (digit_at(p)) ++p, ++mantissa_digits;
        if (p < s_.size() && s_[p] == '.') {
            ++p;
            while (digit_at(p)) ++p, ++mantissa_digits;
        }
        if (mantissa_digits == 0) fail("malformed number", "digits");
        if (p < s_.size() && (s_[p] == 'e' || s_[p] == 'E')) {
            std::size_t q = p + 1;
            if (q < s_.size() && (s_[q] == '+' || s_[q] == '-')) ++q;
            if (digit_at(q)) {
                while (digit_at(q)) ++q;
                p = q;
            }
        }
        if (p < s_.size() && (is_word_char(s_[p]) || s_[p] == '.')) {
            pos_ = p;
            fail("malformed number", "number");
        }
        auto value = parse_number(s_.substr(start, p - start));
        if (!value) fail("number out of range", "finite number");
        pos_ = p;
        return *value;
    }

    Condition condition(int depth) {
        if (depth > kMaxDepth) fail("condition nested too deeply", "shallower condition");
        std::vector<Condition> terms;
        terms.push_back(and_expr(depth));
        while (peek_keyword("OR")) {
            read_word();
            terms.push_back(and_expr(depth));
        }
        return terms.size() == 1 ? std::move(terms.front()) : Condition::any_of(std::move(terms));
    }

    Condition and_expr(int depth) {
        std::vector<Condition> terms;
        terms.push_back(not_expr(depth));
        while (peek_keyword("AND")) {
            read_word();
            terms.push_back(not_expr(depth));
        }
        return terms.size() == 1 ? std::move(terms.front()) : Condition::all_of(std::move(terms));
    }

    Condition not_expr(int depth) {
        if (peek_keyword("NOT")) {
            read_word();
            return Condition::negate(primary(depth));
        }
        return primary(depth);
    }

    Condition primary(int depth) {
        if (consume('(')) {
            Condition inner = condition(depth + 1);
            expect(')');
            return inner;
        }
        std::size_t save = pos_;
        std::string word = read_word();
        if (word == "ISEMPTY") return Condition::is_empty();
        if (word == "MATCHES") {
            expect('(');
            if (peek() != '"') fail("MATCHES needs a string pattern", "STRING");
            std::string pattern = string_literal();
            expect(')');
            return Condition::matches(std::move(pattern));
        }
        if (word == "VALUE") {
            CmpOp op = comparison();
            return Condition::compare(op, literal());
        }
        pos_ = save;
        fail("expected a condition", "( VALUE MATCHES ISEMPTY NOT");
    }

    CmpOp comparison() {
        char c = peek();
        auto next_is = [&](char n) { return pos_ + 1 < s_.size() && s_[pos_ + 1] == n; };
        if (c == '!' && next_is('=')) return pos_ += 2, CmpOp::ne;
        if (c == '<' && next_is('=')) return pos_ += 2, CmpOp::le;
        if (c == '>' && next_is('=')) return pos_ += 2, CmpOp::ge;
        if (c == '<') return ++pos_, CmpOp::lt;
        if (c == '>') return ++pos_, CmpOp::gt;
        if (c == '=') return ++pos_, CmpOp::eq;
        fail("expected a comparison operator", "= != < <= > >=");
    }

    std::string_view s_;
    std::size_t pos_ = 0;
};

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string serialize_named_value(const CellValue& v) {
    if (const auto* t = std::get_if<Text>(&v); t && is_identifier(t->value) && t->value != "TRUE" && t->value != "FALSE")
        return t->value;
    return serialize_literal(v);
}

}  // namespace

Action parse_action(std::string_view text) {
    Parser p(text);
    if (p.at_end()) throw ParseError("empty action", 0, verb_list());
    Action a = p.action();
    if (!p.at_end()) p.fail("unexpected trailing input", "end of action");
    return a;
}

std::vector<Action> parse_script(std::string_view text) {
    Parser p(text);
    std::vector<Action> out;
    while (!p.at_end()) {
        try {
            out.push_back(p.action());
            if (p.at_end()) break;
            if (!p.consume(';')) p.fail("expected ';' between actions", ";");
        } catch (const ScriptParseError&) {
            throw;
        } catch (const ParseError& e) {
            throw ScriptParseError(out.size(), e);
        }
    }
    return out;
}

std::string serialize_literal(const CellValue& v) {
    switch (v.index()) {
        case 1: return quote(std::get<Text>(v).value);
        case 2: return format_number(std::get<double>(v));
        case 3: return std::get<bool>(v) ? "TRUE" : "FALSE";
        case 4: return std::get<Date>(v).iso;
        case 5: return quote(std::get<Formula>(v).source);
        default: return "\"\"";
    }
}

std::string serialize_condition(const Condition& c) {
    using K = Condition::Kind;
    auto wrapped = [](const Condition& child, bool parens) {
        std::string inner = serialize_condition(child);
        return parens ? "(" + inner + ")" : inner;
    };
    switch (c.kind) {
        case K::And:
        case K::Or: {
            std::string out;
            for (const auto& child : c.children) {
                if (!out.empty()) out += c.kind == K::And ? " AND " : " OR ";
                bool parens = child.kind == K::Or || (c.kind == K::And && child.kind == K::And);
                out += wrapped(child, parens);
            }
            return out;
        }
        case K::Not: {
            const Condition& child = c.children.front();
            bool parens = child.kind == K::And || child.kind == K::Or || child.kind == K::Not;
            return "NOT " + wrapped(child, parens);
        }
        case K::Cmp: return "VALUE " + std::string(to_string(c.op)) + " " + serialize_literal(c.literal);
        case K::Matches: return "MATCHES(" + quote(c.pattern) + ")";
        case K::IsEmpty: return "ISEMPTY";
    }
    return {};
}

std::string serialize_action(const Action& a) {
    std::string out(to_string(a.op));
    out += '(';
    bool first = true;
    for (const auto& arg : a.args) {
        if (!first) out += ", ";
        first = false;
        if (const auto* r = std::get_if<Range>(&arg)) {
            out += format_range(*r);
        } else if (const auto* lit = std::get_if<Literal>(&arg)) {
            out += serialize_literal(lit->value);
        } else {
            const auto& n = std::get<Named>(arg);
            out += n.key + "=" + serialize_named_value(n.value);
        }
    }
    out += ')';
    if (a.cond) out += " WHERE " + serialize_condition(*a.cond);
    return out;
}

}  // namespace sheetmind
