#include "sheetmind/session.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "sheetmind/hash.hpp"
#include "sheetmind/workbook_io.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

namespace {

constexpr const char* kFiles[] = {"workbook.json", "transcript.jsonl", "config.json"};

bool is_session_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id)
        if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
    return true;
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw CorruptStore("missing " + p.filename().string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& p, const std::string& content) {
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
        if (!out.flush()) throw Error("cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, p);
}

}  // namespace

PipelineConfig PipelineConfig::for_ablation(std::string_view label) {
    PipelineConfig c;
    if (label == "full") return c;
    if (label == "no_reflection") {
        c.reflection = false;
    } else if (label == "no_manager") {
        c.manager = false;
    } else if (label == "action_only") {
        c.manager = false;
        c.reflection = false;
    } else {
        throw Error("unknown ablation '" + std::string(label) + "' (expected full, no_reflection, no_manager or action_only)");
    }
    return c;
}

std::string PipelineConfig::ablation() const {
    if (manager && reflection) return "full";
    if (manager) return "no_reflection";
    if (reflection) return "no_manager";
    return "action_only";
}

ojson config_to_json(const PipelineConfig& c) {
    return {{"ablation", c.ablation()},
            {"max_action_retries", c.max_action_retries},
            {"max_reformulations", c.max_reformulations},
            {"polish_summary", c.polish_summary}};
}

PipelineConfig config_from_json(const ojson& j) {
    if (!j.is_object()) throw ParseError("config must be a JSON object");
    PipelineConfig c;
    try {
        if (j.contains("ablation")) c = PipelineConfig::for_ablation(j.at("ablation").get<std::string>());
        if (j.contains("max_action_retries")) c.max_action_retries = j.at("max_action_retries").get<int>();
        if (j.contains("max_reformulations")) c.max_reformulations = j.at("max_reformulations").get<int>();
        if (j.contains("polish_summary")) c.polish_summary = j.at("polish_summary").get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed config: ") + e.what());
    } catch (const ParseError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
    if (c.max_action_retries < 0 || c.max_reformulations < 0) throw ParseError("budgets must be non-negative");
    return c;
}

std::string new_session_id() {
    static std::mutex m;
    static std::random_device rd;
    std::lock_guard lock(m);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string id;
    for (int i = 0; i < 4; ++i) {
        std::uint32_t x = rd();
        for (int k = 0; k < 8; ++k) id += kHex[(x >> (4 * k)) & 0xF];
    }
    return id;
}

Session::Session(std::string id, Workbook wb, PipelineConfig config, bool test_mode)
    : id_(std::move(id)), config_(config), workbook_(std::move(wb)), transcript_(test_mode) {}

Workbook Session::workbook() const {
    std::lock_guard lock(state_mutex_);
    return workbook_;
}

void Session::commit(Workbook wb) {
    std::lock_guard lock(state_mutex_);
    workbook_ = std::move(wb);
}

int Session::turns() const {
    int n = 0;
    for (const auto& e : transcript_.events())
        if (e.kind == EventKind::instruction) ++n;
    return n;
}

std::shared_ptr<ChatBackend> Session::backend() const {
    std::lock_guard lock(state_mutex_);
    return backend_;
}

void Session::set_backend(std::shared_ptr<ChatBackend> b) {
    std::lock_guard lock(state_mutex_);
    backend_ = std::move(b);
}

Session::Turn Session::begin_turn() {
    std::unique_lock lock(queue_mutex_);
    std::uint64_t ticket = next_ticket_++;
    queue_cv_.wait(lock, [&] { return serving_ == ticket; });
    return Turn(*this);
}

Session::Turn::~Turn() {
    if (!s_) return;
    {
        std::lock_guard lock(s_->queue_mutex_);
        ++s_->serving_;
    }
    s_->queue_cv_.notify_all();
}

SessionStore::SessionStore(std::filesystem::path root) : root_(std::move(root)) {
    std::error_code ec;
    std::filesystem::create_directories(root_, ec);
    if (ec || !std::filesystem::is_directory(root_)) throw Error("cannot create session store at " + root_.string());
    auto probe = root_ / ".write-test";
    std::ofstream out(probe);
    if (!out) throw Error("session store " + root_.string() + " is not writable");
    out.close();
    std::filesystem::remove(probe, ec);
}

std::shared_ptr<Session> SessionStore::create(Workbook wb, PipelineConfig config, bool test_mode) {
    std::lock_guard lock(mutex_);
    for (int attempt = 0; attempt < 8; ++attempt) {
        std::string id = new_session_id();
        if (cache_.count(id) || std::filesystem::exists(root_ / id)) continue;
        std::filesystem::create_directories(root_ / id);
        auto s = std::make_shared<Session>(id, std::move(wb), config, test_mode);
        cache_[id] = s;
        save(*s);
        return s;
    }
    throw Error("could not allocate a fresh session id");
}

void SessionStore::save(const Session& s) {
    auto dir = root_ / s.id();
    std::filesystem::create_directories(dir);
    ojson config = config_to_json(s.config());
    config["test_mode"] = s.test_mode();
    std::string contents[] = {save_workbook(s.workbook(), WorkbookFormat::json), s.transcript().to_jsonl(),
                              config.dump(2) + "\n"};
    std::string sums;
    for (std::size_t i = 0; i < std::size(kFiles); ++i) {
        write_file(dir / kFiles[i], contents[i]);
        sums += sha256_hex(contents[i]) + "  " + kFiles[i] + "\n";
    }
    write_file(dir / "checksums.txt", sums);
}

std::shared_ptr<Session> SessionStore::load(const std::string& id) {
    if (!is_session_id(id)) throw UnknownSession(id);
    auto dir = root_ / id;
    if (!std::filesystem::is_directory(dir)) throw UnknownSession(id);

    std::map<std::string, std::string> expected;
    std::istringstream sums(read_file(dir / "checksums.txt"));
    std::string line;
    while (std::getline(sums, line)) {
        auto sep = line.find("  ");
        if (sep != 64) throw CorruptStore("malformed checksums.txt in session " + id);
        expected[line.substr(sep + 2)] = line.substr(0, sep);
    }
    std::string contents[std::size(kFiles)];
    for (std::size_t i = 0; i < std::size(kFiles); ++i) {
        contents[i] = read_file(dir / kFiles[i]);
        auto it = expected.find(kFiles[i]);
        if (it == expected.end() || it->second != sha256_hex(contents[i])) {
            throw CorruptStore(std::string(kFiles[i]) + " of session " + id + " fails its checksum");
        }
    }
    try {
        ojson config_json = ojson::parse(contents[2]);
        bool test_mode = config_json.value("test_mode", false);
        config_json.erase("test_mode");
        auto s = std::make_shared<Session>(id, load_workbook(contents[0], WorkbookFormat::json),
                                           config_from_json(config_json), test_mode);
        s->replace_transcript(Transcript::from_jsonl(contents[1], test_mode));
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw CorruptStore("session " + id + ": " + e.what());
    } catch (const Error& e) {
        throw CorruptStore("session " + id + ": " + e.what());
    }
}

std::shared_ptr<Session> SessionStore::get(const std::string& id) {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) return it->second;
    auto s = load(id);
    cache_[id] = s;
    return s;
}

bool SessionStore::exists(const std::string& id) const {
    return is_session_id(id) && std::filesystem::is_directory(root_ / id);
}

}  // namespace sheetmind
