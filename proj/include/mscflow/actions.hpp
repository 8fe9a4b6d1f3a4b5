#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

#include "mscflow/action_decl.hpp"
#include "mscflow/value.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

/// Who is invoking, and how many times this lifeline has invoked the same
/// action before (0-based). Keeping the counter in the caller's state makes
/// backends stateless and replayable.
struct InvocationContext {
    Lifeline lifeline;
    std::size_t index = 0;
};

class ActionBackend {
public:
    virtual ~ActionBackend() = default;

    virtual std::vector<Value> invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                                      const InvocationContext& ctx) = 0;

    /// DSL text for a planner action. Default: backend_failure.
    virtual std::string generate(const ActionDecl& planner, const std::string& prompt,
                                 const InvocationContext& ctx);

    /// True when outputs depend only on (decl, inputs, ctx).
    virtual bool deterministic() const { return false; }
};

using PureFn = std::function<std::vector<Value>(const std::vector<Value>&)>;

/// Named pure functions with fixed arity.
class PureRegistry {
public:
    /// check_agreement, inc_trials, choose_result, record_no_review.
    static PureRegistry builtins();

    void add(std::string name, std::size_t arity, PureFn fn);
    bool has(const std::string& name) const { return fns_.count(name) != 0; }
    std::vector<std::string> names() const;
    /// Throws Errc::unknown_action or Errc::arity.
    std::vector<Value> invoke(const std::string& name, const std::vector<Value>& inputs) const;

private:
    std::map<std::string, std::pair<std::size_t, PureFn>> fns_;
};

std::vector<Value> invoke_pure(const std::string& name, const std::vector<Value>& inputs);

/// Checks arity and types of backend outputs against the declaration.
/// Throws Errc::backend_type_mismatch.
void check_outputs(const ActionDecl& decl, const std::vector<Value>& outputs);

/// Pure actions only.
class PureBackend : public ActionBackend {
public:
    explicit PureBackend(PureRegistry registry = PureRegistry::builtins())
        : registry_(std::move(registry)) {}
    std::vector<Value> invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                              const InvocationContext& ctx) override;
    bool deterministic() const override { return true; }
    const PureRegistry& registry() const { return registry_; }

private:
    PureRegistry registry_;
};

/// Canned outputs. Keys are `Lifeline.action` or `action`; a list value is
/// consumed by invocation index, any other value is returned every time.
/// Each output is an object keyed by output name, a positional array, or a
/// bare scalar for single-output actions. Planner entries hold DSL strings.
struct Script {
    std::map<std::string, nlohmann::json> entries;

    static Script from_json(const nlohmann::json& j);
    static Script load(const std::string& path);
    nlohmann::json to_json() const;
    /// Entry for (lifeline, action), or nullptr.
    const nlohmann::json* find(const Lifeline& at, const std::string& action) const;
};

/// Scripted actions with a pure fallback for unscripted pure actions.
class ScriptBackend : public ActionBackend {
public:
    explicit ScriptBackend(Script script, PureRegistry registry = PureRegistry::builtins())
        : script_(std::move(script)), registry_(std::move(registry)) {}
    std::vector<Value> invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                              const InvocationContext& ctx) override;
    std::string generate(const ActionDecl& planner, const std::string& prompt,
                         const InvocationContext& ctx) override;
    bool deterministic() const override { return true; }

    /// Prompts passed to generate(), in call order.
    std::vector<std::string> prompts() const;

private:
    Script script_;
    PureRegistry registry_;
    mutable std::mutex mu_;
    std::vector<std::string> prompts_;
};

/// Converts one script output record into values of the declared types.
std::vector<Value> coerce_outputs(const ActionDecl& decl, const nlohmann::json& record);

struct LlmClientConfig {
    std::string endpoint = "http://127.0.0.1:8080/v1/chat/completions";
    std::string model = "gpt-4o-mini";
    std::string credential_env = "MSCFLOW_LLM_API_KEY";
    double timeout_seconds = 60.0;

    /// Keys: endpoint, model, credential_env, timeout_seconds. Rejects any
    /// credential-looking key.
    static LlmClientConfig from_json(const nlohmann::json& j);
    static LlmClientConfig load(const std::string& path);
};

/// Replaces `{{name}}` with the display form of the named value. Unknown
/// placeholders are left intact.
std::string render_template(const std::string& tpl, const std::map<std::string, Value>& vars);

/// The request body sent to the chat-completion endpoint.
nlohmann::json build_chat_request(const std::string& model, const std::string& system,
                                  const std::string& user);

/// Posts one chat request and returns choices[0].message.content.
/// Errors: Errc::transport, Errc::http_status, Errc::json_parse.
std::string chat_completion(const LlmClientConfig& config, const std::string& system,
                            const std::string& user);

/// Errors: as chat_completion, plus Errc::json_parse for non-JSON content and
/// Errc::output_field for a missing or ill-typed field.
std::vector<Value> invoke_llm(const ActionDecl& decl, const std::vector<Value>& inputs,
                              const LlmClientConfig& config);

/// LLM actions over HTTP, pure actions locally, planner generation via chat.
class LlmBackend : public ActionBackend {
public:
    explicit LlmBackend(LlmClientConfig config, PureRegistry registry = PureRegistry::builtins())
        : config_(std::move(config)), registry_(std::move(registry)) {}
    std::vector<Value> invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                              const InvocationContext& ctx) override;
    std::string generate(const ActionDecl& planner, const std::string& prompt,
                         const InvocationContext& ctx) override;

private:
    LlmClientConfig config_;
    PureRegistry registry_;
};

} // namespace mscflow
