#include "sheetmind/backend.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace sheetmind {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::system: return "system";
        case Role::user: return "user";
        case Role::assistant: return "assistant";
    }
    return "?";
}

std::optional<Role> role_from_string(std::string_view s) {
    if (s == "system") return Role::system;
    if (s == "user") return Role::user;
    if (s == "assistant") return Role::assistant;
    return std::nullopt;
}

std::optional<std::string> conversation_problem(const Conversation& c) {
    std::size_t i = 0;
    if (!c.empty() && c.front().role == Role::system) ++i;
    if (i == c.size()) return "conversation has no user message";
    Role expect = Role::user;
    for (; i < c.size(); ++i) {
        if (c[i].role != expect) {
            return "message " + std::to_string(i) + " should be " + std::string(to_string(expect));
        }
        if (c[i].content.empty()) return "message " + std::to_string(i) + " is empty";
        expect = expect == Role::user ? Role::assistant : Role::user;
    }
    if (c.back().role != Role::user) return "conversation must end with a user message";
    return std::nullopt;
}

Conversation truncate_conversation(const Conversation& c, std::size_t max_bytes) {
    if (c.empty()) return c;
    std::size_t first = !c.empty() && c.front().role == Role::system ? 1 : 0;
    std::size_t budget = max_bytes;
    if (first == 1) budget = budget > c.front().content.size() ? budget - c.front().content.size() : 0;
    // Walk back from the end, keeping whole turns while they fit.
    std::size_t keep_from = c.size() - 1;
    std::size_t used = c.back().content.size();
    while (keep_from > first && used + c[keep_from - 1].content.size() <= budget) {
        used += c[keep_from - 1].content.size();
        --keep_from;
    }
    // Restart on a user turn so roles still alternate.
    while (keep_from < c.size() - 1 && c[keep_from].role != Role::user) ++keep_from;
    Conversation out;
    if (first == 1) out.push_back(c.front());
    out.insert(out.end(), c.begin() + static_cast<std::ptrdiff_t>(keep_from), c.end());
    return out;
}

std::string prompt_text(const Conversation& conversation) {
    std::string out;
    for (const auto& m : conversation) {
        if (!out.empty()) out += "\n\n";
        out += m.content;
    }
    return out;
}

BackendScript script_from_yaml(const YAML::Node& node) {
    if (!node.IsSequence()) throw ParseError("backend script must be a YAML list");
    BackendScript out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const YAML::Node& e = node[i];
        if (!e.IsMap() || !e["reply"]) {
            throw ParseError("script entry " + std::to_string(i) + " needs a 'reply'");
        }
        ScriptEntry entry;
        entry.reply = e["reply"].as<std::string>();
        if (e["match"] && !e["match"].IsNull()) entry.match = e["match"].as<std::string>();
        if (e["agent"] && !e["agent"].IsNull()) entry.agent = e["agent"].as<std::string>();
        out.push_back(std::move(entry));
    }
    return out;
}

BackendScript parse_script_yaml(std::string_view yaml) {
    try {
        return script_from_yaml(YAML::Load(std::string(yaml)));
    } catch (const YAML::Exception& e) {
        throw ParseError(std::string("malformed script YAML: ") + e.what());
    }
}

BackendScript load_script_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read script " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_script_yaml(buf.str());
}

ChatMessage ScriptedBackend::complete(const Conversation& conversation) {
    if (auto problem = conversation_problem(conversation)) throw Error("malformed conversation: " + *problem);
    std::lock_guard lock(mutex_);
    std::string prompt = prompt_text(conversation);
    prompts_.push_back(prompt);
    if (next_ >= script_.size()) throw ScriptExhausted(next_);
    const ScriptEntry& entry = script_[next_];
    if (entry.match && prompt.find(*entry.match) == std::string::npos) {
        std::string head = conversation.back().content.substr(0, 160);
        std::replace(head.begin(), head.end(), '\n', ' ');
        throw ScriptMismatch(next_, *entry.match, head);
    }
    ++next_;
    return {Role::assistant, entry.reply};
}

std::size_t ScriptedBackend::calls() const {
    std::lock_guard lock(mutex_);
    return prompts_.size();
}

std::size_t ScriptedBackend::remaining() const {
    std::lock_guard lock(mutex_);
    return script_.size() - next_;
}

std::vector<std::string> ScriptedBackend::prompts() const {
    std::lock_guard lock(mutex_);
    return prompts_;
}

void BackendConfig::check() const {
    if (kind == Kind::http && (base_url.empty() || model.empty())) {
        throw Error("http backend needs a base URL and a model (SHEETMIND_LLM_BASE_URL, SHEETMIND_LLM_MODEL)");
    }
    if (!(timeout_seconds > 0)) throw Error("backend timeout must be positive");
    if (max_retries < 0) throw Error("max_retries must be non-negative");
}

BackendConfig config_from_env() {
    BackendConfig c;
    if (const char* url = std::getenv("SHEETMIND_LLM_BASE_URL")) c.base_url = url;
    if (const char* model = std::getenv("SHEETMIND_LLM_MODEL")) c.model = model;
    return c;
}

std::chrono::milliseconds backoff_delay(std::chrono::milliseconds base, int attempt) {
    return base * (1LL << std::min(attempt, 30));
}

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config, std::optional<BackendScript> script) {
    if (config.kind == BackendConfig::Kind::scripted) {
        return std::make_unique<ScriptedBackend>(script.value_or(BackendScript{}));
    }
    return std::make_unique<HttpBackend>(config);
}

}  // namespace sheetmind
