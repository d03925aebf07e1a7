#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>
#include <thread>

#include "sheetmind/backend.hpp"

namespace sheetmind {

namespace {

bool transient(int status) { return status == 429 || status >= 500; }

}  // namespace

HttpBackend::HttpBackend(BackendConfig config) : config_(std::move(config)) {
    config_.check();
    const std::string& url = config_.base_url;
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw Error("backend URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    origin_ = url.substr(0, path_start);
    std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    path_ = prefix + "/chat";
}

HttpBackend::~HttpBackend() = default;

ChatMessage HttpBackend::complete(const Conversation& conversation) {
    if (auto problem = conversation_problem(conversation)) throw Error("malformed conversation: " + *problem);

    nlohmann::json messages = nlohmann::json::array();
    for (const auto& m : truncate_conversation(conversation)) {
        messages.push_back({{"role", to_string(m.role)}, {"content", m.content}});
    }
    nlohmann::json body = {{"model", config_.model}, {"messages", messages}, {"temperature", config_.temperature}};
    std::string payload = body.dump();

    httplib::Client client(origin_);
    auto timeout = std::chrono::duration_cast<std::chrono::microseconds>(
        std::chrono::duration<double>(config_.timeout_seconds));
    client.set_connection_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                                  static_cast<long>(timeout.count() % 1000000));
    client.set_read_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                            static_cast<long>(timeout.count() % 1000000));
    client.set_write_timeout(std::chrono::duration_cast<std::chrono::seconds>(timeout).count(),
                             static_cast<long>(timeout.count() % 1000000));
    httplib::Headers headers;
    if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
        headers.emplace("Authorization", std::string("Bearer ") + key);
    }

    std::string last_failure;
    for (int attempt = 0;; ++attempt) {
        auto res = client.Post(path_, headers, payload, "application/json");
        if (res && res->status == 200) {
            nlohmann::json reply;
            try {
                reply = nlohmann::json::parse(res->body);
            } catch (const nlohmann::json::exception&) {
                throw BackendError("backend reply is not JSON");
            }
            if (!reply.is_object() || !reply.contains("content") || !reply["content"].is_string()) {
                throw BackendError("backend reply lacks a string 'content'");
            }
            std::string content = reply["content"].get<std::string>();
            if (content.empty()) throw BackendError("backend returned an empty reply");
            return {Role::assistant, std::move(content)};
        }
        if (res && !transient(res->status)) {
            throw BackendError("backend returned HTTP " + std::to_string(res->status));
        }
        last_failure = res ? "HTTP " + std::to_string(res->status) : "connection failed (" + httplib::to_string(res.error()) + ")";
        if (attempt >= config_.max_retries) break;
        {
            std::lock_guard lock(mutex_);
            ++retries_;
        }
        std::this_thread::sleep_for(backoff_delay(config_.backoff_base, attempt));
    }
    throw BackendUnavailable("backend unavailable after " + std::to_string(config_.max_retries + 1) +
                             " attempts: " + last_failure);
}

std::size_t HttpBackend::retries() const {
    std::lock_guard lock(mutex_);
    return retries_;
}

}  // namespace sheetmind
