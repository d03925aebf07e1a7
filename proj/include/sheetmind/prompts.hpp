#pragma once

#include <map>
#include <string>
#include <string_view>

#include "sheetmind/backend.hpp"

namespace sheetmind {

using PromptValues = std::map<std::string, std::string, std::less<>>;

/// Names of the shipped templates: manager, action, judge_pre, judge_post, summary.
inline constexpr std::string_view kPromptNames[] = {"manager", "action", "judge_pre", "judge_post", "summary"};

/// Text of a shipped template. Throws Error for unknown names.
std::string_view prompt_template(std::string_view name);

/// Replaces each {{key}} with its value in one pass (values are not
/// re-scanned). Throws Error when the template uses a key with no value.
std::string render_template(std::string_view tmpl, const PromptValues& values);

/// Renders a template and splits it at the "=== user ===" line into a
/// system message and a user message.
Conversation build_prompt(std::string_view name, const PromptValues& values);

}  // namespace sheetmind
