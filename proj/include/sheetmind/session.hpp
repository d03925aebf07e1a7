#pragma once

#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "sheetmind/backend.hpp"
#include "sheetmind/transcript.hpp"
#include "sheetmind/workbook.hpp"

namespace sheetmind {

inline constexpr std::string_view kAblations[] = {"full", "no_reflection", "no_manager", "action_only"};

struct PipelineConfig {
    int max_action_retries = 3;
    int max_reformulations = 1;
    bool manager = true;
    bool reflection = true;
    /// Let the backend rephrase the template summary.
    bool polish_summary = false;

    /// Throws Error for labels outside kAblations.
    static PipelineConfig for_ablation(std::string_view label);
    std::string ablation() const;

    friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

nlohmann::ordered_json config_to_json(const PipelineConfig& c);
/// Missing keys keep their defaults; "ablation" sets the agent switches.
/// Throws ParseError.
PipelineConfig config_from_json(const nlohmann::ordered_json& j);

/// 32 lowercase hex digits from the system random source.
std::string new_session_id();

/// One conversation with its workbook. Instructions run one at a time in
/// arrival order (see begin_turn); state accessors are safe from any thread.
class Session {
public:
    Session(std::string id, Workbook wb, PipelineConfig config, bool test_mode = false);

    const std::string& id() const { return id_; }
    const PipelineConfig& config() const { return config_; }
    bool test_mode() const { return transcript_.test_mode(); }

    Workbook workbook() const;
    void commit(Workbook wb);

    Transcript& transcript() { return transcript_; }
    const Transcript& transcript() const { return transcript_; }
    void replace_transcript(Transcript t) { transcript_ = t; }

    /// Number of instructions received.
    int turns() const;

    /// Backend bound to this session, if any (the server uses this for
    /// per-session scripts).
    std::shared_ptr<ChatBackend> backend() const;
    void set_backend(std::shared_ptr<ChatBackend> b);

    /// Holds the session's turn slot until destroyed.
    class Turn {
    public:
        explicit Turn(Session& s) : s_(&s) {}
        Turn(Turn&& o) noexcept : s_(o.s_) { o.s_ = nullptr; }
        Turn(const Turn&) = delete;
        Turn& operator=(const Turn&) = delete;
        Turn& operator=(Turn&&) = delete;
        ~Turn();

    private:
        Session* s_;
    };

    /// Blocks until every earlier caller has released its Turn (FIFO).
    Turn begin_turn();

private:
    std::string id_;
    PipelineConfig config_;
    mutable std::mutex state_mutex_;
    Workbook workbook_;
    Transcript transcript_;
    std::shared_ptr<ChatBackend> backend_;

    std::mutex queue_mutex_;
    std::condition_variable queue_cv_;
    std::uint64_t next_ticket_ = 0;
    std::uint64_t serving_ = 0;
};

class CorruptStore : public Error {
public:
    using Error::Error;
};

class UnknownSession : public Error {
public:
    explicit UnknownSession(const std::string& id) : Error("unknown session '" + id + "'") {}
};

/// Sessions persisted as <root>/<id>/{workbook.json, transcript.jsonl,
/// config.json, checksums.txt}. Loaded sessions are cached.
class SessionStore {
public:
    /// Creates `root` if needed; throws Error when it cannot be written.
    explicit SessionStore(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }

    std::shared_ptr<Session> create(Workbook wb, PipelineConfig config, bool test_mode = false);
    void save(const Session& s);
    /// Reads from disk, bypassing the cache. Throws UnknownSession or CorruptStore.
    std::shared_ptr<Session> load(const std::string& id);
    /// Cached session, loading it on first use. Throws like load().
    std::shared_ptr<Session> get(const std::string& id);
    bool exists(const std::string& id) const;

private:
    std::filesystem::path root_;
    std::mutex mutex_;
    std::map<std::string, std::shared_ptr<Session>> cache_;
};

}  // namespace sheetmind
