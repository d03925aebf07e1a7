#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace sheetmind {

enum class EventKind {
    instruction,
    plan,
    action_proposed,
    verdict_pre,
    executed,
    verdict_post,
    escalation,
    summary,
    error,
};

std::string_view to_string(EventKind k);
std::optional<EventKind> event_kind_from_string(std::string_view s);

struct Event {
    std::uint64_t seq = 0;
    std::string ts;
    EventKind kind = EventKind::instruction;
    std::optional<int> subtask;
    nlohmann::ordered_json payload = nlohmann::ordered_json::object();

    friend bool operator==(const Event&, const Event&) = default;
};

/// {"seq", "ts", "kind", "subtask", "payload"}
nlohmann::ordered_json event_to_json(const Event& e);
Event event_from_json(const nlohmann::ordered_json& j);

/// Current UTC time as 2024-01-15T09:30:00.123Z.
std::string utc_timestamp();

/// Append-only event log. Sequence numbers start at 1. In test mode the
/// timestamp is the sequence number, so transcripts are byte-stable.
/// Safe to read while another thread appends.
class Transcript {
public:
    explicit Transcript(bool test_mode = false) : test_mode_(test_mode) {}
    Transcript(const Transcript& other);
    Transcript& operator=(const Transcript& other);

    const Event& append(EventKind kind, std::optional<int> subtask, nlohmann::ordered_json payload);

    /// Copies of the events, or of those with seq > `after`.
    std::vector<Event> events() const;
    std::vector<Event> since(std::uint64_t after) const;
    std::size_t size() const;
    bool test_mode() const { return test_mode_; }

    /// One JSON object per line, each line ending in "\n".
    std::string to_jsonl() const;
    /// Throws ParseError on malformed lines or out-of-order sequence numbers.
    static Transcript from_jsonl(std::string_view text, bool test_mode = false);

    friend bool operator==(const Transcript& a, const Transcript& b) { return a.events() == b.events(); }

private:
    mutable std::mutex mutex_;
    bool test_mode_ = false;
    std::vector<Event> events_;
};

}  // namespace sheetmind
