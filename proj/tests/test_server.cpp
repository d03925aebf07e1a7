#include <gtest/gtest.h>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <thread>

#include "sheetmind/server.hpp"
#include "sheetmind/session.hpp"
#include "sheetmind/workbook_io.hpp"

using namespace sheetmind;
using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

class Running {
public:
    Running() : root_(fs::temp_directory_path() / ("sheetmind-srv-" + new_session_id().substr(0, 8))) {
        ServerConfig cfg;
        cfg.port = 0;
        cfg.store = root_;
        cfg.test_mode = true;
        server_ = std::make_unique<Server>(cfg);
        port_ = server_->bind();
        thread_ = std::thread([this] { server_->run(); });
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
        for (int i = 0; i < 100 && !client_->Get("/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ~Running() {
        server_->stop();
        thread_.join();
        fs::remove_all(root_);
    }
    httplib::Client& client() { return *client_; }

private:
    fs::path root_;
    std::unique_ptr<Server> server_;
    int port_ = 0;
    std::thread thread_;
    std::unique_ptr<httplib::Client> client_;
};

json worked_session_body() {
    json script = json::array();
    auto add = [&](const char* agent, const char* match, const char* reply) {
        script.push_back({{"agent", agent}, {"match", match}, {"reply", reply}});
    };
    add("manager", "Decompose", "1. Clear every cell in column E whose text starts with a digit");
    add("action", "Step: ", "DELETE(E:E) WHERE MATCHES(\"^[0-9]\")");
    add("judge_pre", "Answer VALID or INVALID", "VALID");
    add("judge_post", "Answer with one of OK", "OK");
    return {{"workbook", workbook_to_json(load_csv(",,,,9am\n,,,,late\n,,,,3pm\n"))}, {"script", script}};
}

}  // namespace

TEST(Server, Health) {
    Running r;
    auto res = r.client().Get("/health");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["status"], "ok");
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST(Server, InstructionRoundTrip) {
    Running r;
    auto created = r.client().Post("/sessions", worked_session_body().dump(), "application/json");
    ASSERT_TRUE(created);
    ASSERT_EQ(created->status, 201);
    std::string id = json::parse(created->body)["id"];

    auto sheet_before = r.client().Get("/sessions/" + id + "/sheet");
    auto again = r.client().Get("/sessions/" + id + "/sheet");
    ASSERT_TRUE(sheet_before && again);
    EXPECT_EQ(sheet_before->body, again->body);

    json instr = {{"text", "Delete any element from the fifth column that starts with a number"}};
    auto outcome = r.client().Post("/sessions/" + id + "/instructions", instr.dump(), "application/json");
    ASSERT_TRUE(outcome);
    ASSERT_EQ(outcome->status, 200) << outcome->body;
    json o = json::parse(outcome->body);
    EXPECT_EQ(o["status"], "success");
    EXPECT_EQ(o["summary"], "Cleared 2 cells in E.");
    EXPECT_TRUE(o["failure_reason"].is_null());

    Workbook after = workbook_from_json(json::parse(r.client().Get("/sessions/" + id + "/sheet")->body));
    EXPECT_EQ(save_csv(after), ",,,,\n,,,,late\n");

    json events = json::parse(r.client().Get("/sessions/" + id + "/transcript")->body);
    ASSERT_FALSE(events.empty());
    EXPECT_EQ(events.front()["kind"], "instruction");
    EXPECT_EQ(events.back()["kind"], "summary");
    json tail = json::parse(r.client().Get("/sessions/" + id + "/transcript?since=" + std::to_string(events.size() - 1))->body);
    ASSERT_EQ(tail.size(), 1u);
    EXPECT_EQ(tail[0]["kind"], "summary");
}

TEST(Server, Errors) {
    Running r;
    auto missing = r.client().Get("/sessions/0123456789abcdef0123456789abcdef/sheet");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_TRUE(json::parse(missing->body).contains("error"));

    auto bad = r.client().Post("/sessions", "{not json", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    auto no_book = r.client().Post("/sessions", R"({"config":{}})", "application/json");
    EXPECT_EQ(no_book->status, 400);

    auto created = r.client().Post("/sessions", json{{"workbook", workbook_to_json(Workbook())}}.dump(), "application/json");
    std::string id = json::parse(created->body)["id"];
    EXPECT_EQ(r.client().Get("/sessions/" + id + "/transcript?since=abc")->status, 400);
    EXPECT_EQ(r.client().Post("/sessions/" + id + "/instructions", R"({"txt":1})", "application/json")->status, 400);
    EXPECT_EQ(r.client().Post("/sessions/" + id + "/instructions", R"({"text":"x"})", "application/json")->status, 503);
    EXPECT_EQ(r.client().Options("/sessions")->status, 204);
}

TEST(Server, PortInUseFails) {
    httplib::Server holder;
    int port = holder.bind_to_any_port("127.0.0.1");
    std::thread listener([&] { holder.listen_after_bind(); });
    holder.wait_until_ready();
    ServerConfig cfg;
    cfg.port = port;
    cfg.store = fs::temp_directory_path() / ("sheetmind-srv-" + new_session_id().substr(0, 8));
    Server s(cfg);
    EXPECT_THROW(s.bind(), Error);
    holder.stop();
    listener.join();
    fs::remove_all(cfg.store);
}
