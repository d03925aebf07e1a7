#include "sheetmind/prompts.hpp"

#include <algorithm>

namespace sheetmind {

namespace detail {
std::string_view embedded_prompt(std::string_view name);
}

std::string_view prompt_template(std::string_view name) {
    if (std::find(std::begin(kPromptNames), std::end(kPromptNames), name) == std::end(kPromptNames)) {
        throw Error("unknown prompt template '" + std::string(name) + "'");
    }
    return detail::embedded_prompt(name);
}

std::string render_template(std::string_view tmpl, const PromptValues& values) {
    std::string out;
    std::size_t pos = 0;
    while (pos < tmpl.size()) {
        std::size_t open = tmpl.find("{{", pos);
        if (open == std::string_view::npos) break;
        std::size_t close = tmpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        out.append(tmpl.substr(pos, open - pos));
        std::string_view key = tmpl.substr(open + 2, close - open - 2);
        auto it = values.find(key);
        if (it == values.end()) throw Error("no value for template placeholder {{" + std::string(key) + "}}");
        out += it->second;
        pos = close + 2;
    }
    out.append(tmpl.substr(pos));
    return out;
}

Conversation build_prompt(std::string_view name, const PromptValues& values) {
    std::string text = render_template(prompt_template(name), values);
    constexpr std::string_view kSplit = "=== user ===\n";
    auto at = text.find(kSplit);
    if (at == std::string::npos) return {{Role::user, text}};
    std::string system = text.substr(0, at);
    std::string user = text.substr(at + kSplit.size());
    while (!system.empty() && system.back() == '\n') system.pop_back();
    return {{Role::system, system}, {Role::user, user}};
}

}  // namespace sheetmind
