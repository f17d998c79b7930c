#include <doctest.h>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <string>
#include <thread>

#include "devskit/error.hpp"
#include "devskit/genpipe/client.hpp"

using namespace devskit;
using namespace devskit::genpipe;

namespace {

ChatRequest make_request(const std::string& content, const std::string& hint = "h") {
    ChatRequest request;
    request.messages.push_back({"user", content});
    request.schema_hint = hint;
    return request;
}

} // namespace

TEST_CASE("request digests are stable and collision-shy") {
    const std::string d1 = request_digest(make_request("hello"));
    CHECK(d1.size() == 64);
    CHECK(d1.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(request_digest(make_request("hello")) == d1);

    CHECK(request_digest(make_request("hello!")) != d1);
    CHECK(request_digest(make_request("hello", "other-hint")) != d1);

    ChatRequest role_swapped = make_request("hello");
    role_swapped.messages[0].role = "system";
    CHECK(request_digest(role_swapped) != d1);

    // Field boundaries matter: two messages "ab"+"c" differ from "a"+"bc".
    ChatRequest two_a;
    two_a.messages.push_back({"user", "ab"});
    two_a.messages.push_back({"user", "c"});
    ChatRequest two_b;
    two_b.messages.push_back({"user", "a"});
    two_b.messages.push_back({"user", "bc"});
    CHECK(request_digest(two_a) != request_digest(two_b));
}

TEST_CASE("pattern client matches first rule, misses loudly") {
    PatternChatClient client({{"alpha", "A"}, {"alp", "B"}, {"beta", "C"}});
    CHECK(client.send(make_request("say alpha please")) == "A"); // first match wins
    CHECK(client.send(make_request("betamax")) == "C");
    CHECK_THROWS_AS(client.send(make_request("gamma")), PipelineError);
}

TEST_CASE("recording a run produces a replayable mock script") {
    PatternChatClient inner({{"ping", "pong"}, {"add", "sum"}});
    RecordingChatClient recorder(inner);
    CHECK(recorder.send(make_request("ping me")) == "pong");
    CHECK(recorder.send(make_request("add it up")) == "sum");
    CHECK(recorder.send(make_request("ping me")) == "pong"); // repeat, same digest
    CHECK(recorder.call_count() == 3);

    const std::string script_path = "client-script.json";
    {
        std::ofstream out(script_path, std::ios::trunc);
        out << recorder.script_json();
    }
    MockChatClient mock(script_path);
    CHECK(mock.send(make_request("ping me")) == "pong");
    CHECK(mock.send(make_request("add it up")) == "sum");
    CHECK(mock.reply_count() == 2);

    // A prompt that was never recorded names its digest and shows the head.
    CHECK_THROWS_WITH_AS(mock.send(make_request("never recorded")),
                         doctest::Contains("never recorded"), PipelineError);
}

TEST_CASE("mock client rejects unusable scripts") {
    CHECK_THROWS_AS(MockChatClient("/nonexistent/script.json"), ConfigError);

    const std::string bad_json = "bad-script.json";
    {
        std::ofstream out(bad_json, std::ios::trunc);
        out << "not json at all";
    }
    CHECK_THROWS_AS(MockChatClient{bad_json}, ConfigError);

    const std::string bad_shape = "bad-shape.json";
    {
        std::ofstream out(bad_shape, std::ios::trunc);
        out << R"({"responses": {}})";
    }
    CHECK_THROWS_AS(MockChatClient{bad_shape}, ConfigError);
}

TEST_CASE("http client speaks the wire protocol") {
    httplib::Server server;
    std::atomic<int> calls{0};
    server.Post("/chat", [&](const httplib::Request& req, httplib::Response& res) {
        ++calls;
        const auto body = nlohmann::json::parse(req.body);
        REQUIRE(body.at("model").get<std::string>() == "test-model");
        REQUIRE(body.at("schema_hint").get<std::string>() == "h");
        const auto& messages = body.at("messages");
        REQUIRE(messages.size() == 1);
        const std::string content = messages[0].at("content").get<std::string>();
        if (content == "flaky" && calls == 1) {
            res.status = 503; // first attempt fails, the retry succeeds
            return;
        }
        res.set_content(nlohmann::json{{"content", "echo:" + content}}.dump(),
                        "application/json");
    });
    server.Post("/denied", [&](const httplib::Request&, httplib::Response& res) {
        res.status = 403;
    });

    const int port = server.bind_to_any_port("127.0.0.1");
    REQUIRE(port > 0);
    std::thread server_thread([&server] { server.listen_after_bind(); });
    server.wait_until_ready();

    HttpChatConfig config;
    config.base_url = "http://127.0.0.1:" + std::to_string(port);
    config.model = "test-model";

    SUBCASE("round trip") {
        HttpChatClient client(config);
        CHECK(client.send(make_request("hello")) == "echo:hello");
    }
    SUBCASE("5xx retries until success") {
        HttpChatClient client(config);
        CHECK(client.send(make_request("flaky")) == "echo:flaky");
        CHECK(calls == 2);
    }
    SUBCASE("4xx fails immediately") {
        config.path = "/denied";
        HttpChatClient client(config);
        CHECK_THROWS_AS(client.send(make_request("x")), PipelineError);
        CHECK(calls == 0);
    }
    SUBCASE("unreachable backend exhausts retries") {
        config.base_url = "http://127.0.0.1:1"; // nothing listens there
        config.max_attempts = 2;
        config.timeout_seconds = 1.0;
        HttpChatClient client(config);
        CHECK_THROWS_WITH_AS(client.send(make_request("x")),
                             doctest::Contains("2 attempt"), PipelineError);
    }

    server.stop();
    server_thread.join();
}

TEST_CASE("http config validation") {
    CHECK_THROWS_AS(HttpChatClient(HttpChatConfig{.base_url = "ftp://host"}), ConfigError);
    CHECK_THROWS_AS(HttpChatClient(HttpChatConfig{.base_url = "http://host:notaport"}),
                    ConfigError);

    SUBCASE("environment wiring") {
        ::unsetenv("DEVSKIT_CHAT_URL");
        CHECK_THROWS_AS(http_config_from_env(), ConfigError);
        ::setenv("DEVSKIT_CHAT_URL", "http://example:9999", 1);
        ::setenv("DEVSKIT_CHAT_MODEL", "m1", 1);
        const HttpChatConfig config = http_config_from_env();
        CHECK(config.base_url == "http://example:9999");
        CHECK(config.model == "m1");
        ::unsetenv("DEVSKIT_CHAT_URL");
        ::unsetenv("DEVSKIT_CHAT_MODEL");
    }
}
