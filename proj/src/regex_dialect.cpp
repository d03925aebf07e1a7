#include "sheetmind/regex_dialect.hpp"

#include "sheetmind/error.hpp"

namespace sheetmind {

std::optional<std::string> dialect_violation(std::string_view p) {
    if (p.size() > kMaxPatternLength) return "pattern longer than " + std::to_string(kMaxPatternLength) + " bytes";
    int depth = 0;
    bool in_class = false;
    for (std::size_t i = 0; i < p.size(); ++i) {
        char c = p[i];
        if (c == '\\') {
            if (i + 1 >= p.size()) return std::string("trailing backslash");
            char e = p[i + 1];
            if (!in_class && ((e >= '1' && e <= '9') || e == 'k')) return std::string("backreferences are not supported");
            ++i;
            continue;
        }
        if (in_class) {
            if (c == ']') in_class = false;
            continue;
        }
        switch (c) {
            case '[':
                in_class = true;
                // A leading ']' (or '^]') is literal inside the class.
                if (i + 1 < p.size() && p[i + 1] == '^') ++i;
                if (i + 1 < p.size() && p[i + 1] == ']') ++i;
                break;
            case '(':
                if (i + 1 < p.size() && p[i + 1] == '?') {
                    if (i + 2 < p.size() && p[i + 2] == ':') {
                        i += 2;
                    } else {
                        return std::string("lookaround and inline flags are not supported");
                    }
                }
                if (++depth > kMaxGroupDepth) return "groups nested deeper than " + std::to_string(kMaxGroupDepth);
                break;
            case ')':
                if (--depth < 0) return std::string("unbalanced ')'");
                break;
            default: break;
        }
    }
    if (in_class) return std::string("unterminated character class");
    if (depth != 0) return std::string("unbalanced '('");
    return std::nullopt;
}

Pattern Pattern::compile(std::string_view source) {
    if (auto why = dialect_violation(source)) throw Error("regex \"" + std::string(source) + "\": " + *why);
    try {
        std::regex re(source.begin(), source.end(), std::regex::ECMAScript);
        return Pattern(std::string(source), std::move(re));
    } catch (const std::regex_error& e) {
        throw Error("regex \"" + std::string(source) + "\" does not compile: " + e.what());
    }
}

bool Pattern::search(std::string_view text) const { return std::regex_search(text.begin(), text.end(), re_); }

std::optional<std::string> regex_error(std::string_view pattern) {
    try {
        Pattern::compile(pattern);
        return std::nullopt;
    } catch (const Error& e) {
        return std::string(e.what());
    }
}

}  // namespace sheetmind
