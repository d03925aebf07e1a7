#include "sheetmind/server.hpp"

#include <httplib.h>

#include "sheetmind/orchestrator.hpp"
#include "sheetmind/workbook_io.hpp"

namespace sheetmind {

using ojson = nlohmann::ordered_json;

namespace {

void send_json(httplib::Response& res, int status, const ojson& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

std::optional<ojson> parse_body(const httplib::Request& req, httplib::Response& res) {
    try {
        ojson j = ojson::parse(req.body);
        if (!j.is_object()) {
            send_error(res, 400, "request body must be a JSON object");
            return std::nullopt;
        }
        return j;
    } catch (const nlohmann::json::exception&) {
        send_error(res, 400, "request body is not valid JSON");
        return std::nullopt;
    }
}

BackendScript script_from_json(const ojson& j) {
    if (!j.is_array()) throw ParseError("script must be a list");
    BackendScript out;
    for (const auto& e : j) {
        if (!e.is_object() || !e.contains("reply") || !e["reply"].is_string()) {
            throw ParseError("each script entry needs a string 'reply'");
        }
        ScriptEntry entry;
        entry.reply = e["reply"].get<std::string>();
        if (e.contains("match") && e["match"].is_string()) entry.match = e["match"].get<std::string>();
        if (e.contains("agent") && e["agent"].is_string()) entry.agent = e["agent"].get<std::string>();
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace

Server::Server(ServerConfig config)
    : config_(std::move(config)), store_(config_.store), http_(std::make_unique<httplib::Server>()) {
    // httplib defaults to SO_REUSEPORT, which lets a second server share a busy port.
    http_->set_socket_options([](socket_t sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    routes();
}

Server::~Server() { stop(); }

void Server::routes() {
    http_->set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Headers", "Content-Type"},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"}});
    http_->Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    http_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, {{"status", "ok"}});
    });

    http_->Post("/sessions", [this](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req, res);
        if (!body) return;
        try {
            if (!body->contains("workbook")) throw ParseError("missing 'workbook'");
            Workbook wb = workbook_from_json((*body)["workbook"]);
            PipelineConfig cfg = body->contains("config") ? config_from_json((*body)["config"]) : PipelineConfig{};
            std::shared_ptr<ChatBackend> backend;
            if (body->contains("script")) backend = std::make_shared<ScriptedBackend>(script_from_json((*body)["script"]));
            auto session = store_.create(std::move(wb), cfg, config_.test_mode);
            if (backend) session->set_backend(std::move(backend));
            send_json(res, 201, {{"id", session->id()}});
        } catch (const Error& e) {
            send_error(res, 400, e.what());
        }
    });

    auto find = [this](const httplib::Request& req, httplib::Response& res) -> std::shared_ptr<Session> {
        std::string id = req.matches[1];
        try {
            return store_.get(id);
        } catch (const UnknownSession& e) {
            send_error(res, 404, e.what());
        } catch (const CorruptStore& e) {
            send_error(res, 500, e.what());
        }
        return nullptr;
    };

    http_->Get(R"(/sessions/([0-9a-f]+)/sheet)", [find](const httplib::Request& req, httplib::Response& res) {
        auto s = find(req, res);
        if (!s) return;
        send_json(res, 200, workbook_to_json(s->workbook()));
    });

    http_->Get(R"(/sessions/([0-9a-f]+)/transcript)", [find](const httplib::Request& req, httplib::Response& res) {
        auto s = find(req, res);
        if (!s) return;
        std::uint64_t since = 0;
        if (req.has_param("since")) {
            const std::string v = req.get_param_value("since");
            if (v.empty() || v.size() > 18 || v.find_first_not_of("0123456789") != std::string::npos) {
                send_error(res, 400, "since must be a non-negative integer");
                return;
            }
            since = std::stoull(v);
        }
        ojson out = ojson::array();
        for (const auto& e : s->transcript().since(since)) out.push_back(event_to_json(e));
        send_json(res, 200, out);
    });

    http_->Post(R"(/sessions/([0-9a-f]+)/instructions)", [this, find](const httplib::Request& req,
                                                                        httplib::Response& res) {
        auto s = find(req, res);
        if (!s) return;
        auto body = parse_body(req, res);
        if (!body) return;
        if (!body->contains("text") || !(*body)["text"].is_string()) {
            send_error(res, 400, "missing string 'text'");
            return;
        }
        auto backend = s->backend() ? s->backend() : config_.backend;
        if (!backend) {
            send_error(res, 503, "no language model backend is configured");
            return;
        }
        InstructionOutcome outcome = run_instruction(*s, (*body)["text"].get<std::string>(), *backend);
        try {
            store_.save(*s);
        } catch (const std::exception& e) {
            send_error(res, 500, std::string("could not persist session: ") + e.what());
            return;
        }
        send_json(res, 200, outcome_to_json(outcome));
    });

    http_->set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            send_error(res, 500, e.what());
        } catch (...) {
            send_error(res, 500, "internal error");
        }
    });
}

int Server::bind() {
    if (port_ >= 0) return port_;
    if (config_.port == 0) {
        port_ = http_->bind_to_any_port(config_.host);
    } else {
        port_ = http_->bind_to_port(config_.host, config_.port) ? config_.port : -1;
    }
    if (port_ < 0) throw Error("cannot listen on " + config_.host + ":" + std::to_string(config_.port));
    return port_;
}

void Server::run() {
    bind();
    http_->listen_after_bind();
}

void Server::stop() {
    if (http_) http_->stop();
}

}  // namespace sheetmind
