#include <gtest/gtest.h>

#include <atomic>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pddlkit/llm.hpp"
#include "pddlkit/retrieval.hpp"
#include "support.hpp"

using namespace pddlkit;
using json = nlohmann::json;

namespace {

std::vector<Message> convo(const std::string& user) { return {{"system", "You write PDDL."}, {"user", user}}; }

/// Local stand-in for a chat-completions service.
class FakeService {
public:
    FakeService() {
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeService() {
        server_.stop();
        thread_.join();
    }
    std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }
    httplib::Server& server() { return server_; }

private:
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

std::string completion(const std::string& text) {
    return json{{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}}.dump();
}

}  // namespace

TEST(ScriptedBackend, FirstMatchingRuleAnswersAndLastResponseRepeats) {
    ScriptedBackend b({{{"fly", "uav"}, {"one", "two"}}, {{"fly"}, {"other"}}});
    EXPECT_EQ(b.complete(convo("fly the uav"), {}), "one");
    EXPECT_EQ(b.complete(convo("fly the uav"), {}), "two");
    EXPECT_EQ(b.complete(convo("fly the uav"), {}), "two");
    EXPECT_EQ(b.complete(convo("fly a plane"), {}), "other");
    EXPECT_THROW(b.complete(convo("land"), {}), BackendError);
    b.set_default("fallback");
    EXPECT_EQ(b.complete(convo("land"), {}), "fallback");
    EXPECT_EQ(b.calls(), 6u);
}

TEST(ScriptedBackend, MatchesAcrossMessages) {
    ScriptedBackend b({{{"You write PDDL.", "land"}, {"ok"}}});
    EXPECT_EQ(b.complete(convo("land"), {}), "ok");
}

TEST(ScriptedBackend, FromJsonAndLogging) {
    std::ostringstream out;
    auto log = std::make_shared<CallLog>(out);
    auto b = ScriptedBackend::from_json(
        R"({"rules": [{"contains": "fly", "responses": ["A"]}, {"contains": ["x", "y"], "responses": ["B"]}],
            "default": "D"})",
        log);
    EXPECT_EQ(b.complete(convo("fly"), {}), "A");
    EXPECT_EQ(b.complete(convo("y and x"), {}), "B");
    EXPECT_EQ(b.complete(convo("nothing"), {}), "D");
    EXPECT_EQ(log->count(), 3u);
    std::istringstream lines(out.str());
    std::string line;
    int n = 0;
    while (std::getline(lines, line)) {
        const auto j = json::parse(line);
        EXPECT_EQ(j["kind"], "llm");
        EXPECT_EQ(j["backend"], "mock");
        ++n;
    }
    EXPECT_EQ(n, 3);
}

TEST(ScriptedBackend, RejectsBadScripts) {
    EXPECT_THROW(ScriptedBackend::from_json("[1,2]"), BackendError);
    EXPECT_THROW(ScriptedBackend::from_json("not json"), BackendError);
    EXPECT_THROW(ScriptedBackend::from_json(R"({"rules":[{"contains":"a","responses":[]}]})"), BackendError);
    EXPECT_THROW(ScriptedBackend::from_file("/nonexistent/script.json"), BackendError);
}

TEST(HttpBackend, SendsChatRequestAndReadsReply) {
    FakeService svc;
    json seen;
    std::string auth;
    svc.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
        seen = json::parse(req.body);
        auth = req.get_header_value("Authorization");
        res.set_content(completion("(:action fly)"), "application/json");
    });
    std::ostringstream out;
    auto log = std::make_shared<CallLog>(out);
    HttpBackend b({svc.url(), "test-model", "secret", std::chrono::seconds(5), 0}, log);
    EXPECT_EQ(b.complete(convo("hello"), {0.0, 100}), "(:action fly)");
    EXPECT_EQ(auth, "Bearer secret");
    EXPECT_EQ(seen["model"], "test-model");
    EXPECT_EQ(seen["max_tokens"], 100);
    ASSERT_EQ(seen["messages"].size(), 2u);
    EXPECT_EQ(seen["messages"][1]["content"], "hello");
    EXPECT_EQ(log->count(), 1u);
    EXPECT_EQ(json::parse(out.str())["ok"], true);
}

TEST(HttpBackend, RetriesServerErrors) {
    FakeService svc;
    std::atomic<int> hits{0};
    svc.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        if (hits++ == 0) {
            res.status = 500;
            return;
        }
        res.set_content(completion("second"), "application/json");
    });
    auto log = std::make_shared<CallLog>();
    HttpBackend b({svc.url(), "m", "k", std::chrono::seconds(5), 2}, log);
    EXPECT_EQ(b.complete(convo("x"), {}), "second");
    EXPECT_EQ(hits.load(), 2);
    EXPECT_EQ(log->count(), 2u);
}

TEST(HttpBackend, ClientErrorsAreNotRetried) {
    FakeService svc;
    std::atomic<int> hits{0};
    svc.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        ++hits;
        res.status = 401;
        res.set_content("{\"error\":\"bad key\"}", "application/json");
    });
    HttpBackend b({svc.url(), "m", "k", std::chrono::seconds(5), 2});
    EXPECT_THROW(b.complete(convo("x"), {}), BackendError);
    EXPECT_EQ(hits.load(), 1);
}

TEST(HttpBackend, MalformedReplyAndUnreachableHost) {
    FakeService svc;
    svc.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content("{\"choices\": []}", "application/json");
    });
    HttpBackend b({svc.url(), "m", "k", std::chrono::seconds(5), 0});
    EXPECT_THROW(b.complete(convo("x"), {}), BackendError);

    HttpBackend dead({"http://127.0.0.1:1/v1", "m", "k", std::chrono::seconds(1), 0});
    EXPECT_THROW(dead.complete(convo("x"), {}), BackendError);
    HttpBackend noscheme({"localhost/v1", "m", "k", std::chrono::seconds(1), 0});
    EXPECT_THROW(noscheme.complete(convo("x"), {}), BackendError);
}

TEST(HttpEmbedder, AcceptsBothResponseShapes) {
    FakeService svc;
    std::atomic<int> hits{0};
    svc.server().Post("/v1/embeddings", [&](const httplib::Request& req, httplib::Response& res) {
        EXPECT_EQ(json::parse(req.body)["input"], "text");
        if (hits++ == 0) {
            res.set_content("{\"vector\": [1, 0, 0]}", "application/json");
        } else {
            res.set_content("{\"data\": [{\"embedding\": [0, 1, 0]}]}", "application/json");
        }
    });
    HttpEmbedderConfig cfg{svc.url(), "emb", "", std::chrono::seconds(5), 3};
    HttpEmbedder e(cfg);
    EXPECT_EQ(e.embed("text"), (Vector{1, 0, 0}));
    EXPECT_EQ(e.embed("text"), (Vector{0, 1, 0}));
    cfg.dimension = 4;
    EXPECT_THROW(HttpEmbedder(cfg).embed("text"), std::exception);
}
