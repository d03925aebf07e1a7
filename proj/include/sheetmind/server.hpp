#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "sheetmind/backend.hpp"
#include "sheetmind/session.hpp"

namespace httplib {
class Server;
}

namespace sheetmind {

struct ServerConfig {
    std::string host = "127.0.0.1";
    /// 0 picks a free port.
    int port = 8080;
    std::filesystem::path store = "sheetmind-sessions";
    /// Used by sessions created without their own script. May be null, in
    /// which case such sessions cannot run instructions.
    std::shared_ptr<ChatBackend> backend;
    bool test_mode = false;
};

/// JSON API:
///   POST /sessions                       {workbook, config?, script?} -> 201 {id}
///   GET  /sessions/{id}/sheet            -> workbook-json
///   POST /sessions/{id}/instructions     {text} -> outcome
///   GET  /sessions/{id}/transcript?since=N -> [event]
///   GET  /health                         -> {status: "ok"}
/// `script` is a list of {match, reply, agent} entries served to that
/// session only.
class Server {
public:
    explicit Server(ServerConfig config);
    ~Server();

    /// Binds the listening socket and returns the port. Throws Error when
    /// the port is taken.
    int bind();
    /// Serves until stop(); binds first if needed.
    void run();
    /// Stops accepting requests; in-flight requests finish first.
    void stop();

    SessionStore& store() { return store_; }

private:
    void routes();

    ServerConfig config_;
    SessionStore store_;
    std::unique_ptr<httplib::Server> http_;
    int port_ = -1;
};

}  // namespace sheetmind
