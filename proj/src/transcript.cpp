#include "sheetmind/transcript.hpp"

#include <chrono>
#include <ctime>

#include "sheetmind/error.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kKindNames[] = {"instruction", "plan",         "action_proposed",
                                           "verdict_pre", "executed",     "verdict_post",
                                           "escalation",  "summary",      "error"};

}  // namespace

std::string_view to_string(EventKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::optional<EventKind> event_kind_from_string(std::string_view s) {
    for (std::size_t i = 0; i < std::size(kKindNames); ++i) {
        if (kKindNames[i] == s) return static_cast<EventKind>(i);
    }
    return std::nullopt;
}

ojson event_to_json(const Event& e) {
    return {{"seq", e.seq},
            {"ts", e.ts},
            {"kind", std::string(to_string(e.kind))},
            {"subtask", e.subtask ? ojson(*e.subtask) : ojson(nullptr)},
            {"payload", e.payload}};
}

Event event_from_json(const ojson& j) {
    Event e;
    try {
        e.seq = j.at("seq").get<std::uint64_t>();
        e.ts = j.at("ts").get<std::string>();
        auto kind = event_kind_from_string(j.at("kind").get<std::string>());
        if (!kind) throw ParseError("unknown event kind " + j.at("kind").dump());
        e.kind = *kind;
        if (!j.at("subtask").is_null()) e.subtask = j.at("subtask").get<int>();
        e.payload = j.at("payload");
    } catch (const nlohmann::json::exception& ex) {
        throw ParseError(std::string("malformed event: ") + ex.what());
    }
    return e;
}

std::string utc_timestamp() {
    auto now = std::chrono::system_clock::now();
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
    char out[40];
    std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
    return out;
}

Transcript::Transcript(const Transcript& other) {
    std::lock_guard lock(other.mutex_);
    test_mode_ = other.test_mode_;
    events_ = other.events_;
}

Transcript& Transcript::operator=(const Transcript& other) {
    if (this == &other) return *this;
    std::vector<Event> copy = other.events();
    std::lock_guard lock(mutex_);
    test_mode_ = other.test_mode_;
    events_ = std::move(copy);
    return *this;
}

const Event& Transcript::append(EventKind kind, std::optional<int> subtask, ojson payload) {
    std::lock_guard lock(mutex_);
    Event e;
    e.seq = events_.size() + 1;
    e.ts = test_mode_ ? std::to_string(e.seq) : utc_timestamp();
    e.kind = kind;
    e.subtask = subtask;
    e.payload = std::move(payload);
    events_.push_back(std::move(e));
    return events_.back();
}

std::vector<Event> Transcript::events() const {
    std::lock_guard lock(mutex_);
    return events_;
}

std::vector<Event> Transcript::since(std::uint64_t after) const {
    std::lock_guard lock(mutex_);
    if (after >= events_.size()) return {};
    return {events_.begin() + static_cast<std::ptrdiff_t>(after), events_.end()};
}

std::size_t Transcript::size() const {
    std::lock_guard lock(mutex_);
    return events_.size();
}

std::string Transcript::to_jsonl() const {
    std::string out;
    for (const auto& e : events()) out += event_to_json(e).dump() + "\n";
    return out;
}

Transcript Transcript::from_jsonl(std::string_view text, bool test_mode) {
    Transcript t(test_mode);
    std::size_t start = 0, line_no = 0;
    while (start < text.size()) {
        std::size_t nl = text.find('\n', start);
        if (nl == std::string_view::npos) throw ParseError("transcript line " + std::to_string(line_no + 1) + " is truncated");
        std::string_view line = text.substr(start, nl - start);
        ++line_no;
        ojson j;
        try {
            j = ojson::parse(line);
        } catch (const nlohmann::json::exception&) {
            throw ParseError("transcript line " + std::to_string(line_no) + " is not JSON");
        }
        Event e = event_from_json(j);
        if (e.seq != t.events_.size() + 1) throw ParseError("transcript line " + std::to_string(line_no) + " is out of sequence");
        t.events_.push_back(std::move(e));
        start = nl + 1;
    }
    return t;
}

}  // namespace sheetmind
