#pragma once

#include <chrono>
#include <cstddef>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sheetmind/error.hpp"

namespace YAML {
class Node;
}

namespace sheetmind {

enum class Role { system, user, assistant };

std::string_view to_string(Role r);
std::optional<Role> role_from_string(std::string_view s);

struct ChatMessage {
    Role role = Role::user;
    std::string content;
    friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

using Conversation = std::vector<ChatMessage>;

/// Optional leading system message, then user/assistant turns alternating
/// from user and ending with user; user/assistant content nonempty.
std::optional<std::string> conversation_problem(const Conversation& c);

/// Keeps the system message and the most recent turns whose content fits in
/// `max_bytes` (the final message is always kept).
inline constexpr std::size_t kConversationBudget = 32 * 1024;
Conversation truncate_conversation(const Conversation& c, std::size_t max_bytes = kConversationBudget);

class BackendError : public Error {
public:
    using Error::Error;
};

/// Network failure, timeout or server error that outlived the retry budget.
class BackendUnavailable : public BackendError {
public:
    using BackendError::BackendError;
};

class ScriptExhausted : public BackendError {
public:
    explicit ScriptExhausted(std::size_t consumed)
        : BackendError("script exhausted after " + std::to_string(consumed) + " replies") {}
};

class ScriptMismatch : public BackendError {
public:
    ScriptMismatch(std::size_t index, std::string expected, std::string prompt_head)
        : BackendError("script entry " + std::to_string(index) + " expects the prompt to contain \"" + expected +
                       "\"; prompt starts: " + prompt_head),
          expected_(std::move(expected)),
          prompt_head_(std::move(prompt_head)) {}

    const std::string& expected() const { return expected_; }
    const std::string& prompt_head() const { return prompt_head_; }

private:
    std::string expected_;
    std::string prompt_head_;
};

/// A chat-completion endpoint. Implementations are shareable across threads.
class ChatBackend {
public:
    virtual ~ChatBackend() = default;

    /// Returns the assistant reply. Throws BackendError subclasses.
    virtual ChatMessage complete(const Conversation& conversation) = 0;
};

struct ScriptEntry {
    /// Substring the prompt must contain, if any.
    std::optional<std::string> match;
    std::string reply;
    /// Agent that consumes the entry (manager, action, judge_pre,
    /// judge_post, summary). Lets a script written for the full pipeline be
    /// replayed under ablations.
    std::optional<std::string> agent;

    friend bool operator==(const ScriptEntry&, const ScriptEntry&) = default;
};

using BackendScript = std::vector<ScriptEntry>;

/// YAML list of {match, reply, agent?} maps.
BackendScript script_from_yaml(const YAML::Node& node);
BackendScript parse_script_yaml(std::string_view yaml);
BackendScript load_script_file(const std::string& path);

/// Replays a fixed list of replies in order. Calls are serialized.
class ScriptedBackend final : public ChatBackend {
public:
    explicit ScriptedBackend(BackendScript script) : script_(std::move(script)) {}

    ChatMessage complete(const Conversation& conversation) override;

    std::size_t calls() const;
    std::size_t remaining() const;
    /// Text of every prompt seen so far, in order.
    std::vector<std::string> prompts() const;

private:
    mutable std::mutex mutex_;
    BackendScript script_;
    std::size_t next_ = 0;
    std::vector<std::string> prompts_;
};

/// Every message's content, joined with blank lines; what `match` is tested against.
std::string prompt_text(const Conversation& conversation);

struct BackendConfig {
    enum class Kind { http, scripted };

    Kind kind = Kind::http;
    std::string base_url;
    std::string model;
    std::string api_key_env = "SHEETMIND_LLM_API_KEY";
    double timeout_seconds = 60;
    int max_retries = 3;
    double temperature = 0;
    std::chrono::milliseconds backoff_base{500};

    /// Throws Error when an http config lacks base_url/model or timeout <= 0.
    void check() const;
};

/// http config from SHEETMIND_LLM_BASE_URL and SHEETMIND_LLM_MODEL.
BackendConfig config_from_env();

/// Delay before retry `attempt` (0-based): base * 2^attempt.
std::chrono::milliseconds backoff_delay(std::chrono::milliseconds base, int attempt);

/// POST {base_url}/chat with {"model", "messages", "temperature"}; reads
/// {"content"}. Retries connection failures, 429 and 5xx with exponential
/// backoff.
class HttpBackend final : public ChatBackend {
public:
    explicit HttpBackend(BackendConfig config);
    ~HttpBackend() override;

    ChatMessage complete(const Conversation& conversation) override;

    /// Retries performed across all calls.
    std::size_t retries() const;

private:
    BackendConfig config_;
    std::string origin_;
    std::string path_;
    mutable std::mutex mutex_;
    std::size_t retries_ = 0;
};

std::unique_ptr<ChatBackend> make_backend(const BackendConfig& config, std::optional<BackendScript> script = {});

}  // namespace sheetmind
