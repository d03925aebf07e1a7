#include "sheetmind/action.hpp"

#include <algorithm>
#include <cmath>

namespace sheetmind {

namespace {

constexpr ArgKind kRange[] = {ArgKind::range};
constexpr ArgKind kRangeLiteral[] = {ArgKind::range, ArgKind::literal};
constexpr ArgKind kNumber[] = {ArgKind::number};
constexpr ArgKind kRangeRange[] = {ArgKind::range, ArgKind::range};

constexpr std::string_view kOrders[] = {"ASC", "DESC"};
constexpr std::string_view kFns[] = {"SUM", "AVG", "MIN", "MAX", "COUNT"};

constexpr NamedSpec kCount[] = {{"count", false, true, {}}};
constexpr NamedSpec kSortNamed[] = {{"key", true, false, {}}, {"order", false, false, kOrders}};
constexpr NamedSpec kAggNamed[] = {{"fn", true, false, kFns}};

const Signature kSignatures[] = {
    {Verb::SELECT, kRange, {}, true, false},
    {Verb::SET, kRangeLiteral, {}, true, false},
    {Verb::DELETE, kRange, {}, true, false},
    {Verb::DELETE_ROWS, kRange, {}, true, true},
    {Verb::INSERT_ROWS, kNumber, kCount, false, false},
    {Verb::INSERT_COLS, kNumber, kCount, false, false},
    {Verb::DELETE_COLS, kRange, {}, false, false},
    {Verb::SORT, kRange, kSortNamed, false, false},
    {Verb::COPY, kRangeRange, {}, false, false},
    {Verb::AGGREGATE, kRangeRange, kAggNamed, true, false},
};

bool is_literal_value(const CellValue& v) {
    return std::holds_alternative<Text>(v) || std::holds_alternative<double>(v) ||
           std::holds_alternative<bool>(v) || std::holds_alternative<Date>(v);
}

std::string_view kind_name(ArgKind k) {
    switch (k) {
        case ArgKind::range: return "a range";
        case ArgKind::number: return "a number";
        case ArgKind::literal: return "a literal";
    }
    return "?";
}

}  // namespace

std::string_view to_string(Verb v) {
    switch (v) {
        case Verb::SELECT: return "SELECT";
        case Verb::SET: return "SET";
        case Verb::DELETE: return "DELETE";
        case Verb::DELETE_ROWS: return "DELETE_ROWS";
        case Verb::INSERT_ROWS: return "INSERT_ROWS";
        case Verb::INSERT_COLS: return "INSERT_COLS";
        case Verb::DELETE_COLS: return "DELETE_COLS";
        case Verb::SORT: return "SORT";
        case Verb::COPY: return "COPY";
        case Verb::AGGREGATE: return "AGGREGATE";
    }
    return "?";
}

std::optional<Verb> verb_from_string(std::string_view s) {
    for (Verb v : kAllVerbs)
        if (to_string(v) == s) return v;
    return std::nullopt;
}

std::string_view to_string(CmpOp op) {
    switch (op) {
        case CmpOp::eq: return "=";
        case CmpOp::ne: return "!=";
        case CmpOp::lt: return "<";
        case CmpOp::le: return "<=";
        case CmpOp::gt: return ">";
        case CmpOp::ge: return ">=";
    }
    return "?";
}

std::string_view to_string(Verdict::Code c) {
    switch (c) {
        case Verdict::Code::parse: return "parse";
        case Verdict::Code::arity: return "arity";
        case Verdict::Code::bounds: return "bounds";
        case Verdict::Code::verb: return "verb";
        case Verdict::Code::regex: return "regex";
        case Verdict::Code::semantic: return "semantic";
    }
    return "?";
}

std::vector<const Arg*> Action::positional() const {
    std::vector<const Arg*> out;
    for (const auto& a : args)
        if (!std::holds_alternative<Named>(a)) out.push_back(&a);
    return out;
}

const Named* Action::named(std::string_view key) const {
    for (const auto& a : args)
        if (const auto* n = std::get_if<Named>(&a); n && n->key == key) return n;
    return nullptr;
}

const Signature& signature(Verb v) {
    for (const auto& s : kSignatures)
        if (s.verb == v) return s;
    return kSignatures[0];
}

std::optional<std::string> check_signature(const Action& a) {
    const Signature& sig = signature(a.op);
    const std::string verb(to_string(a.op));

    auto pos = a.positional();
    if (pos.size() != sig.positional.size()) {
        return verb + " takes " + std::to_string(sig.positional.size()) + " positional argument" +
               (sig.positional.size() == 1 ? "" : "s") + ", got " + std::to_string(pos.size());
    }
    for (std::size_t i = 0; i < pos.size(); ++i) {
        const Arg& arg = *pos[i];
        ArgKind want = sig.positional[i];
        bool ok = false;
        if (want == ArgKind::range) {
            ok = std::holds_alternative<Range>(arg);
        } else if (const auto* lit = std::get_if<Literal>(&arg)) {
            ok = want == ArgKind::number ? std::holds_alternative<double>(lit->value) : is_literal_value(lit->value);
        }
        if (!ok) {
            return verb + " argument " + std::to_string(i + 1) + " must be " + std::string(kind_name(want));
        }
    }

    std::vector<std::string_view> seen;
    for (const auto& arg : a.args) {
        const auto* n = std::get_if<Named>(&arg);
        if (!n) continue;
        auto spec = std::find_if(sig.named.begin(), sig.named.end(), [&](const NamedSpec& s) { return s.key == n->key; });
        if (spec == sig.named.end()) return verb + " does not take '" + n->key + "='";
        if (std::find(seen.begin(), seen.end(), n->key) != seen.end()) return "duplicate '" + n->key + "='";
        seen.push_back(spec->key);
        if (spec->numeric) {
            if (!std::holds_alternative<double>(n->value)) return "'" + n->key + "=' must be a number";
            continue;
        }
        const auto* word = std::get_if<Text>(&n->value);
        if (!word) return "'" + n->key + "=' must be a word";
        if (spec->words.empty()) {
            if (!column_from_letters(word->value)) return "'" + n->key + "=' must be column letters";
        } else if (std::find(spec->words.begin(), spec->words.end(), word->value) == spec->words.end()) {
            std::string allowed;
            for (auto w : spec->words) allowed += (allowed.empty() ? "" : "|") + std::string(w);
            return "'" + n->key + "=' must be one of " + allowed;
        }
    }
    for (const auto& spec : sig.named) {
        if (spec.required && std::find(seen.begin(), seen.end(), spec.key) == seen.end()) {
            return verb + " requires '" + std::string(spec.key) + "='";
        }
    }

    if (a.cond && !sig.conditionable) return verb + " does not accept WHERE";
    if (!a.cond && sig.cond_required) return verb + " requires a WHERE condition";
    return std::nullopt;
}

}  // namespace sheetmind
