#include "sheetmind/agents.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "sheetmind/grammar.hpp"
#include "sheetmind/prompts.hpp"
#include "sheetmind/validate.hpp"

namespace sheetmind {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\f' || c == '\v'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string_view trim(std::string_view s) {
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) nl = text.size();
        out.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return out;
}

// Reads up to 6 digits at `pos`; nullopt when there are none or too many.
std::optional<int> read_int(std::string_view s, std::size_t& pos) {
    std::size_t start = pos;
    while (pos < s.size() && is_digit(s[pos])) ++pos;
    if (pos == start || pos - start > 6) return std::nullopt;
    int v = 0;
    for (std::size_t i = start; i < pos; ++i) v = v * 10 + (s[i] - '0');
    return v;
}

bool starts_with_keyword(std::string_view line, std::string_view keyword) {
    if (line.size() < keyword.size()) return false;
    for (std::size_t i = 0; i < keyword.size(); ++i) {
        if (std::toupper(static_cast<unsigned char>(line[i])) != keyword[i]) return false;
    }
    if (line.size() == keyword.size()) return true;
    char next = line[keyword.size()];
    return !std::isalnum(static_cast<unsigned char>(next)) && next != '_';
}

std::string rest_after(std::string_view line, std::size_t n) {
    std::string_view rest = line.substr(n);
    while (!rest.empty() && (is_space(rest.front()) || rest.front() == ':' || rest.front() == '-')) {
        rest.remove_prefix(1);
    }
    return std::string(trim(rest));
}

std::string_view first_nonblank_line(std::string_view reply) {
    for (auto line : split_lines(reply)) {
        line = trim(line);
        while (!line.empty() && (line.front() == '*' || line.front() == '`')) line.remove_prefix(1);
        if (!line.empty()) return line;
    }
    return {};
}

// Conversation turn asking the model to try again.
void add_reprompt(Conversation& c, const std::string& reply, const std::string& complaint) {
    c.push_back({Role::assistant, reply.empty() ? std::string("(empty)") : reply});
    c.push_back({Role::user, complaint});
}

std::string column_span(const std::set<std::uint32_t>& cols) {
    if (cols.size() == 1) return column_letters(*cols.begin());
    if (*cols.rbegin() - *cols.begin() + 1 == cols.size()) {
        return column_letters(*cols.begin()) + ":" + column_letters(*cols.rbegin());
    }
    std::string out;
    for (auto c : cols) out += (out.empty() ? "" : ", ") + column_letters(c);
    return out;
}

std::string cells(std::size_t n) { return std::to_string(n) + (n == 1 ? " cell" : " cells"); }

}  // namespace

Plan parse_plan(std::string_view reply) {
    Plan plan;
    plan.raw = std::string(reply);
    for (auto raw_line : split_lines(reply)) {
        std::string_view line = trim(raw_line);
        std::size_t pos = 0;
        auto index = read_int(line, pos);
        if (!index || pos >= line.size() || (line[pos] != '.' && line[pos] != ')')) continue;
        ++pos;
        std::string_view body = trim(line.substr(pos));
        std::vector<int> deps;
        if (!body.empty() && body.back() == ']') {
            auto open = body.rfind('[');
            std::string_view tag = open == std::string_view::npos ? std::string_view{} : body.substr(open + 1);
            tag.remove_suffix(tag.empty() ? 0 : 1);
            tag = trim(tag);
            if (starts_with_keyword(tag, "AFTER")) {
                std::string_view list = trim(tag.substr(5));
                std::size_t p = 0;
                while (true) {
                    while (p < list.size() && is_space(list[p])) ++p;
                    auto dep = read_int(list, p);
                    if (!dep) throw ParseError("bad dependency list in step " + std::to_string(*index));
                    deps.push_back(*dep);
                    while (p < list.size() && is_space(list[p])) ++p;
                    if (p == list.size()) break;
                    if (list[p] != ',') throw ParseError("bad dependency list in step " + std::to_string(*index));
                    ++p;
                }
                body = trim(body.substr(0, open));
            }
        }
        int expected = static_cast<int>(plan.subtasks.size()) + 1;
        if (*index != expected) {
            throw ParseError("step " + std::to_string(*index) + " found where step " + std::to_string(expected) +
                             " was expected");
        }
        if (body.empty()) throw ParseError("step " + std::to_string(*index) + " has no description");
        for (int d : deps) {
            if (d < 1 || d >= *index) {
                throw ParseError("step " + std::to_string(*index) + " depends on step " + std::to_string(d));
            }
        }
        std::sort(deps.begin(), deps.end());
        deps.erase(std::unique(deps.begin(), deps.end()), deps.end());
        plan.subtasks.push_back({*index, std::string(body), std::move(deps)});
    }
    if (plan.subtasks.empty()) throw ParseError("no numbered steps");
    return plan;
}

Plan manager_plan(const std::string& instruction, const SheetContext& ctx, ChatBackend& backend,
                  const std::string& notes) {
    Conversation c = build_prompt("manager", {{"verbs", verb_reference()},
                                              {"context", ctx.render()},
                                              {"notes", notes},
                                              {"instruction", instruction}});
    std::string problem;
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatMessage reply = backend.complete(c);
        try {
            return parse_plan(reply.content);
        } catch (const ParseError& e) {
            problem = e.what();
            add_reprompt(c, reply.content,
                         "That plan could not be parsed: " + problem + ". Reply with numbered steps only.");
        }
    }
    throw PlanningFailure("planning-failure: " + problem);
}

std::optional<Action> extract_action(std::string_view reply, std::string* first_error) {
    bool have_error = false;
    for (auto raw_line : split_lines(reply)) {
        std::string_view line = trim(raw_line);
        if (line.empty() || line.substr(0, 3) == "```") continue;
        while (!line.empty() && line.front() == '`') line.remove_prefix(1);
        while (!line.empty() && line.back() == '`') line.remove_suffix(1);
        line = trim(line);
        if (line.empty()) continue;
        try {
            return parse_action(line);
        } catch (const Error& e) {
            if (!have_error && first_error) *first_error = e.what();
            have_error = true;
        }
    }
    if (!have_error && first_error) *first_error = "reply contains no action";
    return std::nullopt;
}

Generation action_generate(const Subtask& t, const SheetContext& ctx, const std::optional<std::string>& feedback,
                           ChatBackend& backend) {
    std::string feedback_text;
    if (feedback) feedback_text = "Your previous action was rejected: " + *feedback + "\nWrite a corrected action.";
    Conversation c = build_prompt("action", {{"grammar", std::string(kActionGrammar)},
                                             {"verbs", verb_reference()},
                                             {"context", ctx.render()},
                                             {"subtask", t.description},
                                             {"feedback", feedback_text}});
    std::string problem;
    for (int attempt = 1; attempt <= 3; ++attempt) {
        ChatMessage reply = backend.complete(c);
        if (auto action = extract_action(reply.content, &problem)) return {std::move(*action), reply.content, attempt};
        add_reprompt(c, reply.content,
                     "That reply could not be parsed: " + problem + "\nReply with one action in the grammar.");
    }
    throw GenerationFailure("no valid action after 3 replies: " + problem);
}

std::optional<Verdict> parse_judge_pre(std::string_view reply) {
    std::string_view line = first_nonblank_line(reply);
    if (starts_with_keyword(line, "INVALID")) {
        std::string reason = rest_after(line, 7);
        return Verdict::invalid(Verdict::Code::semantic, reason.empty() ? "judge rejected the action" : reason);
    }
    if (starts_with_keyword(line, "VALID")) return Verdict::ok();
    return std::nullopt;
}

Verdict reflect_pre(const Subtask& t, const Action& a, const Workbook& wb, ChatBackend& backend) {
    Verdict v = validate_static(a, wb);
    if (!v.valid) return v;
    Conversation c = build_prompt("judge_pre", {{"context", extract_context(wb).render()},
                                                {"subtask", t.description},
                                                {"action", serialize_action(a)}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatMessage reply = backend.complete(c);
        if (auto verdict = parse_judge_pre(reply.content)) return *verdict;
        add_reprompt(c, reply.content, "Start your reply with VALID or INVALID.");
    }
    return Verdict::invalid(Verdict::Code::semantic, std::string(kJudgeUnparseable));
}

std::string_view to_string(PostVerdict::Kind k) {
    switch (k) {
        case PostVerdict::Kind::ok: return "ok";
        case PostVerdict::Kind::retry: return "retry";
        case PostVerdict::Kind::escalate: return "escalate";
    }
    return "?";
}

std::optional<PostVerdict> parse_judge_post(std::string_view reply) {
    std::string_view line = first_nonblank_line(reply);
    if (starts_with_keyword(line, "OK")) return PostVerdict::ok();
    if (starts_with_keyword(line, "RETRY")) {
        std::string text = rest_after(line, 5);
        return PostVerdict::retry(text.empty() ? "judge asked for another attempt" : text);
    }
    if (starts_with_keyword(line, "ESCALATE")) {
        std::string text = rest_after(line, 8);
        return PostVerdict::escalate(text.empty() ? "judge escalated the step" : text);
    }
    return std::nullopt;
}

bool is_mutating(Verb v) { return v != Verb::SELECT; }

PostVerdict reflect_post(const Subtask& t, const Action& a, const SheetSnapshot&, const SheetSnapshot&,
                         const ExecutionResult& result, ChatBackend& backend) {
    if (is_mutating(a.op) && result.diff.empty()) return PostVerdict::retry(std::string(kNoChangeFeedback));
    Conversation c = build_prompt("judge_post", {{"subtask", t.description},
                                                 {"action", serialize_action(a)},
                                                 {"effect", describe_effect(result.diff, result.selection)}});
    for (int attempt = 0; attempt < 2; ++attempt) {
        ChatMessage reply = backend.complete(c);
        if (auto verdict = parse_judge_post(reply.content)) return *verdict;
        add_reprompt(c, reply.content, "Start your reply with OK, RETRY: or ESCALATE:.");
    }
    return PostVerdict::retry(std::string(kJudgeUnparseable));
}

std::string describe_effect(const SheetDiff& d, const std::optional<std::vector<SelectedCell>>& selection) {
    constexpr std::size_t kListLimit = 30;
    std::string out;
    if (selection) {
        out += "Selected " + cells(selection->size()) + ".";
        for (std::size_t i = 0; i < selection->size() && i < kListLimit; ++i) {
            const auto& s = (*selection)[i];
            out += "\n" + s.sheet + "!" + format_address(s.addr) + " = " + describe(s.value);
        }
        if (selection->size() > kListLimit) out += "\n...";
        out += "\n";
    }
    auto clauses = summary_clauses(d);
    if (clauses.empty()) {
        out += "No cells changed.";
        return out;
    }
    for (const auto& c : clauses) out += "Change: " + c + "\n";
    for (std::size_t i = 0; i < d.cell_changes.size() && i < kListLimit; ++i) {
        const auto& c = d.cell_changes[i];
        out += c.sheet + "!" + format_address(c.addr) + ": " + describe(c.before) + " -> " + describe(c.after) + "\n";
    }
    if (d.cell_changes.size() > kListLimit) out += "...\n";
    out.pop_back();
    return out;
}

std::vector<std::string> summary_clauses(const SheetDiff& d) {
    std::vector<std::string> out;
    for (const auto& s : d.sheet_changes) {
        out.push_back((s.kind == SheetChangeKind::sheet_added ? "added sheet " : "removed sheet ") + s.name);
    }
    for (const auto& s : d.structural_changes) {
        bool rows = s.kind == StructuralKind::rows_inserted || s.kind == StructuralKind::rows_deleted;
        bool inserted = s.kind == StructuralKind::rows_inserted || s.kind == StructuralKind::cols_inserted;
        std::string what = std::to_string(s.count) + (rows ? (s.count == 1 ? " row" : " rows")
                                                           : (s.count == 1 ? " column" : " columns"));
        std::string where = rows ? "row " + std::to_string(s.at) : "column " + column_letters(s.at);
        out.push_back((inserted ? "inserted " : "deleted ") + what + " at " + where + " in " + s.sheet);
    }

    struct Tally {
        std::size_t cleared = 0, filled = 0, updated = 0;
        std::set<std::uint32_t> cleared_cols, filled_cols, updated_cols;
    };
    std::vector<std::pair<std::string, Tally>> per_sheet;
    for (const auto& c : d.cell_changes) {
        auto it = std::find_if(per_sheet.begin(), per_sheet.end(), [&](const auto& p) { return p.first == c.sheet; });
        if (it == per_sheet.end()) it = per_sheet.insert(per_sheet.end(), {c.sheet, Tally{}});
        Tally& t = it->second;
        if (is_empty(c.after)) {
            ++t.cleared;
            t.cleared_cols.insert(c.addr.col);
        } else if (is_empty(c.before)) {
            ++t.filled;
            t.filled_cols.insert(c.addr.col);
        } else {
            ++t.updated;
            t.updated_cols.insert(c.addr.col);
        }
    }
    for (const auto& [sheet, t] : per_sheet) {
        std::string suffix = per_sheet.size() > 1 ? " of " + sheet : "";
        if (t.cleared) out.push_back("cleared " + cells(t.cleared) + " in " + column_span(t.cleared_cols) + suffix);
        if (t.filled) out.push_back("filled " + cells(t.filled) + " in " + column_span(t.filled_cols) + suffix);
        if (t.updated) out.push_back("updated " + cells(t.updated) + " in " + column_span(t.updated_cols) + suffix);
    }
    return out;
}

std::vector<std::string> numbers_in(std::string_view text) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < text.size();) {
        if (!is_digit(text[i])) {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < text.size() && is_digit(text[i])) ++i;
        out.emplace_back(text.substr(start, i - start));
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string summarize(const std::vector<SheetDiff>& diffs, ChatBackend* polish) {
    std::vector<std::string> clauses;
    for (const auto& d : diffs) {
        auto more = summary_clauses(d);
        clauses.insert(clauses.end(), more.begin(), more.end());
    }
    if (clauses.empty()) return "No changes were made.";
    std::string text;
    for (const auto& c : clauses) text += (text.empty() ? "" : "; ") + c;
    text[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(text[0])));
    text += ".";
    if (!polish) return text;
    try {
        ChatMessage reply = polish->complete(build_prompt("summary", {{"summary", text}}));
        std::string candidate(trim(reply.content));
        if (!candidate.empty() && numbers_in(candidate) == numbers_in(text)) return candidate;
    } catch (const Error&) {
    }
    return text;
}

}  // namespace sheetmind
