#include "mscflow/actions.hpp"

#include <fstream>
#include <sstream>

#include "mscflow/error.hpp"

namespace mscflow {

std::string ActionBackend::generate(const ActionDecl& planner, const std::string&,
                                    const InvocationContext&) {
    throw Error(Errc::backend_failure,
                "backend cannot generate workflows for planner '" + planner.name + "'");
}

PureRegistry PureRegistry::builtins() {
    PureRegistry r;
    r.add("check_agreement", 2, [](const std::vector<Value>& in) {
        return std::vector<Value>{Value::boolean(in[0] == in[1])};
    });
    r.add("inc_trials", 1, [](const std::vector<Value>& in) {
        return std::vector<Value>{Value::integer(in[0].as_integer() + 1)};
    });
    r.add("choose_result", 2, [](const std::vector<Value>& in) {
        return std::vector<Value>{in[1].as_boolean() ? in[0] : Value::string("unknown")};
    });
    r.add("record_no_review", 1, [](const std::vector<Value>&) {
        return std::vector<Value>{Value::boolean(true)};
    });
    return r;
}

void PureRegistry::add(std::string name, std::size_t arity, PureFn fn) {
    fns_[std::move(name)] = {arity, std::move(fn)};
}

std::vector<std::string> PureRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [n, _] : fns_) out.push_back(n);
    return out;
}

std::vector<Value> PureRegistry::invoke(const std::string& name,
                                        const std::vector<Value>& inputs) const {
    auto it = fns_.find(name);
    if (it == fns_.end())
        throw Error(Errc::unknown_action, "no pure function named '" + name + "'");
    if (it->second.first != inputs.size())
        throw Error(Errc::arity, "pure function '" + name + "' takes " +
                                     std::to_string(it->second.first) + " inputs, got " +
                                     std::to_string(inputs.size()));
    try {
        return it->second.second(inputs);
    } catch (const Error& e) {
        if (e.code() == Errc::type)
            throw Error(Errc::input, "pure function '" + name + "': " + e.what());
        throw;
    }
}

std::vector<Value> invoke_pure(const std::string& name, const std::vector<Value>& inputs) {
    static const PureRegistry reg = PureRegistry::builtins();
    return reg.invoke(name, inputs);
}

void check_outputs(const ActionDecl& decl, const std::vector<Value>& outputs) {
    if (outputs.size() != decl.outputs.size())
        throw Error(Errc::backend_type_mismatch,
                    "action '" + decl.name + "' returned " + std::to_string(outputs.size()) +
                        " values, declared " + std::to_string(decl.outputs.size()));
    for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i].type() != decl.outputs[i].type)
            throw Error(Errc::backend_type_mismatch,
                        "action '" + decl.name + "' output '" + decl.outputs[i].name +
                            "' has type " + std::string(type_name(outputs[i].type())) +
                            ", declared " + std::string(type_name(decl.outputs[i].type)));
    }
}

std::vector<Value> PureBackend::invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                                       const InvocationContext&) {
    if (decl.kind != ActionKind::pure)
        throw Error(Errc::backend_failure, "pure backend cannot run " +
                                               std::string(to_string(decl.kind)) + " action '" +
                                               decl.name + "'");
    return registry_.invoke(decl.name, inputs);
}

Script Script::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::script, "script must be a JSON object");
    Script s;
    for (const auto& [k, v] : j.items()) s.entries[k] = v;
    return s;
}

Script Script::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::io, "cannot open script file '" + path + "'");
    try {
        return from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::script, "script file '" + path + "': " + e.what());
    }
}

nlohmann::json Script::to_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, v] : entries) j[k] = v;
    return j;
}

const nlohmann::json* Script::find(const Lifeline& at, const std::string& action) const {
    auto it = entries.find(at.name() + "." + action);
    if (it == entries.end()) it = entries.find(action);
    return it == entries.end() ? nullptr : &it->second;
}

namespace {

const nlohmann::json& pick(const nlohmann::json& entry, const std::string& key,
                           const InvocationContext& ctx) {
    if (!entry.is_array()) return entry;
    if (ctx.index >= entry.size())
        throw Error(Errc::script, "script entry '" + key + "' exhausted at invocation " +
                                      std::to_string(ctx.index + 1) + " by " +
                                      ctx.lifeline.name());
    return entry[ctx.index];
}

} // namespace

std::vector<Value> coerce_outputs(const ActionDecl& decl, const nlohmann::json& record) {
    std::vector<Value> out;
    auto one = [&](const nlohmann::json& v, const TypedName& t) {
        auto c = Value::coerce(v, t.type);
        if (!c)
            throw Error(Errc::backend_type_mismatch, "action '" + decl.name + "' output '" +
                                                         t.name + "': cannot read " + v.dump() +
                                                         " as " +
                                                         std::string(type_name(t.type)));
        out.push_back(*c);
    };
    if (record.is_object()) {
        for (const auto& t : decl.outputs) {
            if (!record.contains(t.name))
                throw Error(Errc::backend_type_mismatch,
                            "action '" + decl.name + "': output '" + t.name + "' missing");
            one(record[t.name], t);
        }
    } else if (record.is_array()) {
        if (record.size() != decl.outputs.size())
            throw Error(Errc::backend_type_mismatch,
                        "action '" + decl.name + "': expected " +
                            std::to_string(decl.outputs.size()) + " outputs, script gives " +
                            std::to_string(record.size()));
        for (std::size_t i = 0; i < record.size(); ++i) one(record[i], decl.outputs[i]);
    } else {
        if (decl.outputs.size() != 1)
            throw Error(Errc::backend_type_mismatch,
                        "action '" + decl.name + "': scalar script output for " +
                            std::to_string(decl.outputs.size()) + " outputs");
        one(record, decl.outputs[0]);
    }
    return out;
}

std::vector<Value> ScriptBackend::invoke(const ActionDecl& decl, const std::vector<Value>& inputs,
                                         const InvocationContext& ctx) {
    if (const auto* entry = script_.find(ctx.lifeline, decl.name))
        return coerce_outputs(decl, pick(*entry, decl.name, ctx));
    if (decl.kind == ActionKind::pure && registry_.has(decl.name))
        return registry_.invoke(decl.name, inputs);
    throw Error(Errc::script, "no script entry for action '" + decl.name + "' at " +
                                  ctx.lifeline.name());
}

std::string ScriptBackend::generate(const ActionDecl& planner, const std::string& prompt,
                                    const InvocationContext& ctx) {
    {
        std::lock_guard<std::mutex> lock(mu_);
        prompts_.push_back(prompt);
    }
    const auto* entry = script_.find(ctx.lifeline, planner.name);
    if (!entry)
        throw Error(Errc::script, "no script entry for planner '" + planner.name + "'");
    const auto& text = pick(*entry, planner.name, ctx);
    if (!text.is_string())
        throw Error(Errc::script, "planner entry '" + planner.name + "' must hold strings");
    return text.get<std::string>();
}

std::vector<std::string> ScriptBackend::prompts() const {
    std::lock_guard<std::mutex> lock(mu_);
    return prompts_;
}

} // namespace mscflow
