#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "sheetmind/action.hpp"
#include "sheetmind/error.hpp"

namespace sheetmind {

/// EBNF of the action language. Embedded verbatim in Action Agent prompts.
extern const std::string_view kActionGrammar;

/// One line per verb describing its arguments; also shown to the model.
std::string verb_reference();

class UnknownVerbError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Arguments or WHERE clause that do not fit the verb's signature.
class ArityError : public ParseError {
public:
    using ParseError::ParseError;
};

/// Parses one action. Whitespace between tokens is free; keywords are
/// uppercase. Throws ParseError (or a subclass) with the byte position and
/// the expected token set.
Action parse_action(std::string_view text);

/// `;`-separated actions; blank input yields no actions and a trailing `;`
/// is accepted. Errors are ScriptParseError carrying the action index.
std::vector<Action> parse_script(std::string_view text);

/// Canonical text: single space after commas and around WHERE/AND/OR and
/// comparison operators, strings double-quoted with \" and \\ escapes.
std::string serialize_action(const Action& a);
std::string serialize_condition(const Condition& c);
std::string serialize_literal(const CellValue& v);

}  // namespace sheetmind
