#include <cmath>
#include <cstdlib>
#include <fstream>

#include <httplib.h>

#include "mscflow/actions.hpp"
#include "mscflow/error.hpp"

namespace mscflow {

LlmClientConfig LlmClientConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::io, "LLM config must be a JSON object");
    for (const auto& [k, _] : j.items()) {
        if (k == "api_key" || k == "key" || k == "token" || k == "credential" ||
            k == "password")
            throw Error(Errc::io, "LLM config must not contain credentials (key '" + k +
                                      "'); set the environment variable named by credential_env");
    }
    LlmClientConfig c;
    c.endpoint = j.value("endpoint", c.endpoint);
    c.model = j.value("model", c.model);
    c.credential_env = j.value("credential_env", c.credential_env);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    return c;
}

LlmClientConfig LlmClientConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open LLM config '" + path + "'");
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::io, "LLM config '" + path + "': " + e.what());
    }
}

std::string render_template(const std::string& tpl, const std::map<std::string, Value>& vars) {
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        auto open = tpl.find("{{", i);
        if (open == std::string::npos) break;
        auto close = tpl.find("}}", open + 2);
        if (close == std::string::npos) break;
        out.append(tpl, i, open - i);
        std::string name = tpl.substr(open + 2, close - open - 2);
        auto it = vars.find(name);
        if (it != vars.end()) out += it->second.to_display();
        else out.append(tpl, open, close + 2 - open);
        i = close + 2;
    }
    out.append(tpl, i, std::string::npos);
    return out;
}

nlohmann::json build_chat_request(const std::string& model, const std::string& system,
                                  const std::string& user) {
    return nlohmann::json{{"model", model},
                          {"messages",
                           nlohmann::json::array({{{"role", "system"}, {"content", system}},
                                                  {{"role", "user"}, {"content", user}}})}};
}

namespace {

struct Endpoint {
    std::string origin; // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const std::string http = "http://";
    if (url.rfind(http, 0) != 0)
        throw Error(Errc::transport, "unsupported endpoint '" + url + "': only http:// is built in");
    auto slash = url.find('/', http.size());
    if (slash == std::string::npos) return {url, "/"};
    return {url.substr(0, slash), url.substr(slash)};
}

} // namespace

std::string chat_completion(const LlmClientConfig& config, const std::string& system,
                            const std::string& user) {
    const char* key = std::getenv(config.credential_env.c_str());
    if (!key || !*key)
        throw Error(Errc::backend_failure,
                    "credential environment variable " + config.credential_env + " is not set");

    auto ep = split_endpoint(config.endpoint);
    httplib::Client cli(ep.origin);
    auto secs = static_cast<time_t>(config.timeout_seconds);
    auto usecs = static_cast<time_t>((config.timeout_seconds - std::floor(config.timeout_seconds)) * 1e6);
    cli.set_connection_timeout(secs, usecs);
    cli.set_read_timeout(secs, usecs);
    cli.set_write_timeout(secs, usecs);

    httplib::Headers headers{{"Authorization", std::string("Bearer ") + key}};
    auto body = build_chat_request(config.model, system, user).dump();
    auto res = cli.Post(ep.path, headers, body, "application/json");
    if (!res)
        throw Error(Errc::transport, "request to " + config.endpoint + " failed: " +
                                         httplib::to_string(res.error()));
    if (res->status < 200 || res->status >= 300)
        throw Error(Errc::http_status,
                    "endpoint returned HTTP " + std::to_string(res->status));
    try {
        auto j = nlohmann::json::parse(res->body);
        return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::json_parse, std::string("malformed chat response: ") + e.what());
    }
}

namespace {

// Tolerates a fenced ```json block around the object.
std::string strip_fence(std::string s) {
    auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) return s;
    s = s.substr(first);
    if (s.rfind("```", 0) != 0) return s;
    auto nl = s.find('\n');
    auto end = s.rfind("```");
    if (nl == std::string::npos || end <= nl) return s;
    return s.substr(nl + 1, end - nl - 1);
}

} // namespace

std::vector<Value> invoke_llm(const ActionDecl& decl, const std::vector<Value>& inputs,
                              const LlmClientConfig& config) {
    if (decl.kind != ActionKind::llm)
        throw Error(Errc::contract, "invoke_llm on non-llm action '" + decl.name + "'");
    if (inputs.size() != decl.inputs.size())
        throw Error(Errc::arity, "action '" + decl.name + "' takes " +
                                     std::to_string(decl.inputs.size()) + " inputs");
    std::map<std::string, Value> vars;
    for (std::size_t i = 0; i < inputs.size(); ++i) vars[decl.inputs[i].name] = inputs[i];
    auto content = chat_completion(config, render_template(decl.system_template, vars),
                                   render_template(decl.user_template, vars));
    nlohmann::json obj;
    try {
        obj = nlohmann::json::parse(strip_fence(content));
    } catch (const nlohmann::json::exception&) {
        throw Error(Errc::json_parse,
                    "action '" + decl.name + "': response content is not JSON");
    }
    if (!obj.is_object())
        throw Error(Errc::json_parse, "action '" + decl.name + "': response is not a JSON object");
    std::vector<Value> out;
    for (const auto& t : decl.outputs) {
        if (!obj.contains(t.name))
            throw Error(Errc::output_field,
                        "action '" + decl.name + "': response lacks field '" + t.name + "'");
        auto v = Value::coerce(obj[t.name], t.type);
        if (!v)
            throw Error(Errc::output_field, "action '" + decl.name + "': field '" + t.name +
                                                "' is not a " + std::string(type_name(t.type)));
        out.push_back(*v);
    }
    return out;
}

std::vector<Value> LlmBackend::invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                                      const InvocationContext&) {
    switch (decl.kind) {
    case ActionKind::llm: return invoke_llm(decl, inputs, config_);
    case ActionKind::pure: return registry_.invoke(decl.name, inputs);
    case ActionKind::planner: break;
    }
    throw Error(Errc::contract, "planner actions are run by the runtime, not invoked");
}

std::string LlmBackend::generate(const ActionDecl&, const std::string& prompt,
                                 const InvocationContext&) {
    return chat_completion(config_, prompt,
                           "Write the workflow now. Reply with DSL text only.");
}

} // namespace mscflow
