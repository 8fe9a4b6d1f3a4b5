#include <doctest.h>

#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>

#include "helpers.hpp"
#include "mscflow/actions.hpp"
#include "mscflow/error.hpp"

using namespace mscflow;
using namespace testing;

namespace {

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::io;
}

std::string chat_body(const std::string& content) {
    return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

// Local chat-completion fake. Each request gets `reply`; the last request
// body and headers are kept for inspection.
class FakeServer {
public:
    FakeServer() {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            std::lock_guard<std::mutex> lock(mu_);
            last_body_ = req.body;
            last_auth_ = req.get_header_value("Authorization");
            res.status = status_;
            res.set_content(reply_, "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }
    ~FakeServer() {
        server_.stop();
        thread_.join();
    }

    void reply(int status, std::string body) {
        std::lock_guard<std::mutex> lock(mu_);
        status_ = status;
        reply_ = std::move(body);
    }
    void content(const std::string& c) { reply(200, chat_body(c)); }
    std::string last_body() {
        std::lock_guard<std::mutex> lock(mu_);
        return last_body_;
    }
    std::string last_auth() {
        std::lock_guard<std::mutex> lock(mu_);
        return last_auth_;
    }

    LlmClientConfig config() const {
        LlmClientConfig c;
        c.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/v1/chat/completions";
        c.model = "test-model";
        c.credential_env = "MSCFLOW_TEST_LLM_KEY";
        c.timeout_seconds = 5;
        return c;
    }

private:
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::mutex mu_;
    int status_ = 200;
    std::string reply_;
    std::string last_body_;
    std::string last_auth_;
};

const ActionDecl& assess() {
    static const Corpus c = load("consensus");
    return c.registry.at("assess");
}

const std::vector<Value> assess_inputs{Value::string("fever, lactate 4.1"), Value::string("sepsis")};

} // namespace

TEST_CASE("pure functions") {
    CHECK(invoke_pure("check_agreement", {Value::string("yes"), Value::string("yes")}) ==
          std::vector<Value>{Value::boolean(true)});
    CHECK(invoke_pure("check_agreement", {Value::string("yes"), Value::string("no")}) ==
          std::vector<Value>{Value::boolean(false)});
    CHECK(invoke_pure("choose_result", {Value::string("yes"), Value::boolean(false)}) ==
          std::vector<Value>{Value::string("unknown")});
    CHECK(invoke_pure("choose_result", {Value::string("no"), Value::boolean(true)}) ==
          std::vector<Value>{Value::string("no")});
    CHECK(invoke_pure("inc_trials", {Value::integer(0)}) == std::vector<Value>{Value::integer(1)});
    CHECK(invoke_pure("record_no_review", {Value::string("p")}) == std::vector<Value>{Value::boolean(true)});
    CHECK(code_of([] { invoke_pure("nope", {}); }) == Errc::unknown_action);
    CHECK(code_of([] { invoke_pure("inc_trials", {}); }) == Errc::arity);
    for (int i = 0; i < 3; ++i)
        CHECK(invoke_pure("inc_trials", {Value::integer(41)}) == std::vector<Value>{Value::integer(42)});
}

TEST_CASE("output checking") {
    auto decl = *parse_actions("pure f(x: int) -> (a: int, b: str)").value;
    CHECK_NOTHROW(check_outputs(decl[0], {Value::integer(1), Value::string("s")}));
    CHECK(code_of([&] { check_outputs(decl[0], {Value::integer(1)}); }) == Errc::backend_type_mismatch);
    CHECK(code_of([&] { check_outputs(decl[0], {Value::string("1"), Value::string("s")}); }) ==
          Errc::backend_type_mismatch);
}

TEST_CASE("script backend") {
    auto decls = make_registry(*parse_actions(R"(
        pure inc_trials(t: int) -> (t: int)
        llm two(x: str) -> (a: str, n: int) { system: "s" user: "{{x}}" parse: json }
        llm one(x: str) -> (flag: bool) { system: "s" user: "{{x}}" parse: json }
    )").value);
    auto s = Script::from_json(nlohmann::json::parse(R"({
        "two": [{"a": "first", "n": 1}, ["second", "2"]],
        "B.two": {"a": "bee", "n": 7},
        "one": true
    })"));
    ScriptBackend b(s);
    CHECK(b.invoke(decls.at("two"), {Value::string("")}, {L("A"), 0}) ==
          std::vector<Value>{Value::string("first"), Value::integer(1)});
    CHECK(b.invoke(decls.at("two"), {Value::string("")}, {L("A"), 1}) ==
          std::vector<Value>{Value::string("second"), Value::integer(2)});
    CHECK(code_of([&] { b.invoke(decls.at("two"), {Value::string("")}, {L("A"), 2}); }) == Errc::script);
    CHECK(b.invoke(decls.at("two"), {Value::string("")}, {L("B"), 5}) ==
          std::vector<Value>{Value::string("bee"), Value::integer(7)});
    CHECK(b.invoke(decls.at("one"), {Value::string("")}, {L("A"), 9}) == std::vector<Value>{Value::boolean(true)});
    // Unscripted pure actions fall back to the registry.
    CHECK(b.invoke(decls.at("inc_trials"), {Value::integer(4)}, {L("A"), 0}) == std::vector<Value>{Value::integer(5)});
    CHECK(b.deterministic());

    ScriptBackend empty(Script{});
    CHECK(code_of([&] { empty.invoke(decls.at("one"), {Value::string("")}, {L("A"), 0}); }) == Errc::script);

    CHECK(code_of([&] { coerce_outputs(decls.at("two"), nlohmann::json{{"a", "x"}}); }) ==
          Errc::backend_type_mismatch);
    CHECK(code_of([&] { coerce_outputs(decls.at("two"), nlohmann::json("x")); }) == Errc::backend_type_mismatch);
    CHECK(code_of([&] { coerce_outputs(decls.at("one"), nlohmann::json("maybe")); }) ==
          Errc::backend_type_mismatch);

    CHECK(code_of([] { Script::load(source_path("workflows/does-not-exist.json")); }) == Errc::io);
    CHECK(code_of([] { Script::from_json(nlohmann::json::array()); }) == Errc::script);
    auto loaded = Script::load(source_path("workflows/scripts/consensus_agree_round2.json"));
    CHECK(Script::from_json(loaded.to_json()).entries == loaded.entries);
}

TEST_CASE("template rendering") {
    std::map<std::string, Value> vars{{"notes", Value::string("fever")}, {"diag", Value::string("sepsis")},
                                      {"n", Value::integer(3)}};
    CHECK(render_template(assess().user_template, vars) == "Notes: fever\nDiagnosis: sepsis");
    CHECK(render_template("{{n}} and {{missing}} and {{", vars) == "3 and {{missing}} and {{");
    CHECK(render_template("", vars).empty());
}

TEST_CASE("chat request shape") {
    auto j = build_chat_request("m", "sys", "usr");
    CHECK(j.at("model") == "m");
    REQUIRE(j.at("messages").size() == 2);
    CHECK(j["messages"][0] == nlohmann::json{{"role", "system"}, {"content", "sys"}});
    CHECK(j["messages"][1] == nlohmann::json{{"role", "user"}, {"content", "usr"}});
}

TEST_CASE("llm client against a local server") {
    FakeServer server;
    auto cfg = server.config();
    ::setenv("MSCFLOW_TEST_LLM_KEY", "sk-test-123", 1);

    SUBCASE("success") {
        server.content(R"({"verdict":"yes","reason":"lactate above 4"})");
        auto out = invoke_llm(assess(), assess_inputs, cfg);
        CHECK(out == std::vector<Value>{Value::string("yes"), Value::string("lactate above 4")});
        auto req = nlohmann::json::parse(server.last_body());
        CHECK(req.at("model") == "test-model");
        auto user = req["messages"][1]["content"].get<std::string>();
        auto sys = req["messages"][0]["content"].get<std::string>();
        CHECK(user == "Notes: fever, lactate 4.1\nDiagnosis: sepsis");
        CHECK(user.find("{{") == std::string::npos);
        CHECK(sys.find("{{") == std::string::npos);
        CHECK(server.last_auth() == "Bearer sk-test-123");
    }
    SUBCASE("fenced content") {
        server.content("```json\n{\"verdict\":\"no\",\"reason\":\"r\"}\n```");
        CHECK(invoke_llm(assess(), assess_inputs, cfg)[0] == Value::string("no"));
    }
    SUBCASE("not json") {
        server.content("not json");
        CHECK(code_of([&] { invoke_llm(assess(), assess_inputs, cfg); }) == Errc::json_parse);
    }
    SUBCASE("malformed envelope") {
        server.reply(200, "{\"nothing\": 1}");
        CHECK(code_of([&] { invoke_llm(assess(), assess_inputs, cfg); }) == Errc::json_parse);
    }
    SUBCASE("missing field") {
        server.content(R"({"verdict":"yes"})");
        CHECK(code_of([&] { invoke_llm(assess(), assess_inputs, cfg); }) == Errc::output_field);
    }
    SUBCASE("ill-typed field") {
        auto one = *parse_actions(R"(llm f(x: str) -> (n: int) { system: "s" user: "{{x}}" parse: json })").value;
        server.content(R"({"n":"many"})");
        CHECK(code_of([&] { invoke_llm(one[0], {Value::string("q")}, cfg); }) == Errc::output_field);
        server.content(R"({"n":"12"})");
        CHECK(invoke_llm(one[0], {Value::string("q")}, cfg) == std::vector<Value>{Value::integer(12)});
    }
    SUBCASE("status") {
        server.reply(500, "{}");
        CHECK(code_of([&] { invoke_llm(assess(), assess_inputs, cfg); }) == Errc::http_status);
        server.reply(401, "{}");
        CHECK(code_of([&] { chat_completion(cfg, "s", "u"); }) == Errc::http_status);
    }
    SUBCASE("backend routes by kind") {
        server.content(R"({"verdict":"unknown","reason":"r"})");
        LlmBackend backend(cfg);
        CHECK(backend.invoke(assess(), assess_inputs, {L("LLM1"), 0})[0] == Value::string("unknown"));
        auto pure = *parse_actions("pure inc_trials(t: int) -> (t: int)").value;
        CHECK(backend.invoke(pure[0], {Value::integer(1)}, {L("LLM1"), 0})[0] == Value::integer(2));
        CHECK_FALSE(backend.deterministic());
    }
    ::unsetenv("MSCFLOW_TEST_LLM_KEY");
}

TEST_CASE("llm client failures without a server") {
    LlmClientConfig cfg;
    cfg.credential_env = "MSCFLOW_TEST_LLM_KEY_UNSET";
    ::unsetenv("MSCFLOW_TEST_LLM_KEY_UNSET");
    CHECK(code_of([&] { chat_completion(cfg, "s", "u"); }) == Errc::backend_failure);

    ::setenv("MSCFLOW_TEST_LLM_KEY_UNSET", "k", 1);
    cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
    cfg.timeout_seconds = 2;
    CHECK(code_of([&] { chat_completion(cfg, "s", "u"); }) == Errc::transport);
    cfg.endpoint = "ftp://example.invalid/";
    CHECK(code_of([&] { chat_completion(cfg, "s", "u"); }) == Errc::transport);
    // no TLS support is built in; refused before any connection attempt
    cfg.endpoint = "https://example.invalid/v1/chat/completions";
    CHECK(code_of([&] { chat_completion(cfg, "s", "u"); }) == Errc::transport);
    ::unsetenv("MSCFLOW_TEST_LLM_KEY_UNSET");
}

TEST_CASE("client config never holds credentials") {
    auto c = LlmClientConfig::from_json(nlohmann::json::parse(
        R"({"endpoint": "http://localhost:9/x", "model": "m", "credential_env": "MY_KEY", "timeout_seconds": 3})"));
    CHECK(c.endpoint == "http://localhost:9/x");
    CHECK(c.credential_env == "MY_KEY");
    CHECK(c.timeout_seconds == 3);
    for (const char* key : {"api_key", "token", "credential"}) {
        nlohmann::json j{{"model", "m"}, {key, "sk-secret"}};
        CHECK(code_of([&] { LlmClientConfig::from_json(j); }) == Errc::io);
    }
}
