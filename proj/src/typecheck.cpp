#include "mscflow/typecheck.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "mscflow/error.hpp"

namespace mscflow {

bool AvailabilityEnv::available(const Lifeline& at, const std::string& name) const {
    return type_of(at, name).has_value();
}

std::optional<ValueType> AvailabilityEnv::type_of(const Lifeline& at,
                                                  const std::string& name) const {
    auto it = vars.find(at);
    if (it == vars.end()) return std::nullopt;
    auto jt = it->second.find(name);
    if (jt == it->second.end()) return std::nullopt;
    return jt->second;
}

void AvailabilityEnv::bind(const Lifeline& at, const std::string& name, ValueType t) {
    vars[at][name] = t;
}

AvailabilityEnv AvailabilityEnv::intersect(const AvailabilityEnv& a, const AvailabilityEnv& b) {
    AvailabilityEnv out;
    for (const auto& [lifeline, names] : a.vars) {
        for (const auto& [name, type] : names) {
            if (b.type_of(lifeline, name) == type) out.bind(lifeline, name, type);
        }
    }
    return out;
}

std::optional<PayloadMismatch> check_payload_match(
    const Payload& send, const Payload& recv,
    const std::function<std::optional<ValueType>(const std::string&)>& send_type,
    const std::function<std::optional<ValueType>(const std::string&)>& recv_type) {
    if (send.size() != recv.size()) {
        return PayloadMismatch{PayloadMismatch::Kind::length, 0,
                               "payload length mismatch: sender has " +
                                   std::to_string(send.size()) + " components, receiver has " +
                                   std::to_string(recv.size())};
    }
    for (std::size_t i = 0; i < send.size(); ++i) {
        const auto& x = send[i];
        const auto& y = recv[i];
        auto idx = std::to_string(i + 1);
        if (y.is_const()) {
            if (!x.is_const() || !(x.value() == y.value())) {
                return PayloadMismatch{PayloadMismatch::Kind::constant, i + 1,
                                       "receiver expects constant " + y.value().to_source() +
                                           " at index " + idx + " but sender provides " +
                                           x.to_source()};
            }
            continue;
        }
        auto want = recv_type(y.var_name());
        if (!want) continue;
        std::optional<ValueType> have =
            x.is_const() ? std::optional<ValueType>(x.value().type()) : send_type(x.var_name());
        if (have && *have != *want) {
            return PayloadMismatch{PayloadMismatch::Kind::type, i + 1,
                                   "type mismatch at index " + idx + ": receiver variable '" +
                                       y.var_name() + "' has type " +
                                       std::string(type_name(*want)) + " but sender provides " +
                                       std::string(type_name(*have))};
        }
    }
    return std::nullopt;
}

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

class Checker {
public:
    Checker(const WorkflowDecl& decl, const ActionRegistry& actions)
        : decl_(decl), actions_(actions) {}

    TypeCheckResult run() {
        AvailabilityEnv env;
        for (const auto* list : {&decl_.params, &decl_.vars}) {
            for (const auto& v : *list) {
                check_name(v.owner, v.span);
                if (v.initial && v.initial->type() != v.type)
                    error("initializer-type", v.span,
                          "initial value " + v.initial->to_source() + " of '" + v.name +
                              "' does not have type " + std::string(type_name(v.type)));
                declare(v.owner, v.name, v.type, v.span);
                env.bind(v.owner, v.name, v.type);
            }
        }
        env = check(decl_.body, env);

        if (auto t = env.type_of(decl_.return_at, decl_.return_var)) {
            if (decl_.return_type && *decl_.return_type != *t)
                error("return-type", decl_.span,
                      "return variable '" + decl_.return_var + "' has type " +
                          std::string(type_name(*t)) + " but the workflow returns " +
                          std::string(type_name(*decl_.return_type)));
        } else {
            error("return-unavailable", decl_.span,
                  "return variable '" + decl_.return_var + "' is not available at " +
                      decl_.return_at.name() + " at the end of the workflow");
        }

        if (!has_errors(diags_)) assert_symbols_typed(decl_.body);
        return TypeCheckResult{std::move(diags_), std::move(types_)};
    }

private:
    void error(std::string code, const SourceSpan& span, std::string msg) {
        diags_.push_back(Diagnostic{Severity::error, std::move(code), std::move(msg), span});
    }

    void check_name(const Lifeline& l, const SourceSpan& span) {
        if (l.name().rfind(kReservedPrefix, 0) == 0)
            error("reserved", span, "lifeline name '" + l.name() + "' uses the reserved prefix");
    }

    // Each (lifeline, variable) pair has one type for the whole workflow.
    bool declare(const Lifeline& at, const std::string& name, ValueType t,
                 const SourceSpan& span) {
        auto [it, inserted] = types_.emplace(std::make_pair(at, name), t);
        if (!inserted && it->second != t) {
            error("variable-type", span,
                  "variable '" + name + "' at " + at.name() + " has type " +
                      std::string(type_name(it->second)) + " but is bound to a " +
                      std::string(type_name(t)) + " here");
            return false;
        }
        return true;
    }

    std::optional<ValueType> known_type(const Lifeline& at, const std::string& name) const {
        auto it = types_.find({at, name});
        if (it == types_.end()) return std::nullopt;
        return it->second;
    }

    void require_available(const AvailabilityEnv& env, const Lifeline& at, const Atom& a,
                           const SourceSpan& span) {
        if (a.is_var() && !env.available(at, a.var_name()))
            error("unavailable", span,
                  "variable '" + a.var_name() + "' is not available at " + at.name());
    }

    std::optional<ValueType> cond_type(const Condition& c, const Lifeline& owner,
                                       const AvailabilityEnv& env, const SourceSpan& span) {
        using Op = Condition::Op;
        switch (c.op()) {
        case Op::literal: return c.literal_value().type();
        case Op::var: {
            auto t = env.type_of(owner, c.var_name());
            if (!t)
                error("unavailable", span,
                      "condition variable '" + c.var_name() + "' is not available at " +
                          owner.name());
            return t;
        }
        case Op::negate: {
            auto t = cond_type(c.operand(), owner, env, span);
            if (t && *t != ValueType::boolean)
                error("condition-type", span, "operand of 'not' must be bool");
            return ValueType::boolean;
        }
        case Op::conj:
        case Op::disj: {
            for (const auto& side : {c.lhs(), c.rhs()}) {
                auto t = cond_type(side, owner, env, span);
                if (t && *t != ValueType::boolean)
                    error("condition-type", span, "operands of 'and'/'or' must be bool");
            }
            return ValueType::boolean;
        }
        case Op::eq:
        case Op::lt:
        case Op::le: {
            auto a = cond_type(c.lhs(), owner, env, span);
            auto b = cond_type(c.rhs(), owner, env, span);
            if (a && b && *a != *b)
                error("condition-type", span,
                      "comparison '" + c.to_source() + "' between " +
                          std::string(type_name(*a)) + " and " + std::string(type_name(*b)));
            if (c.op() != Op::eq && a && *a == ValueType::boolean)
                error("condition-type", span, "ordering comparison on bool operands");
            return ValueType::boolean;
        }
        }
        return std::nullopt;
    }

    void check_condition(const Condition& c, const Lifeline& owner, const AvailabilityEnv& env,
                         const SourceSpan& span) {
        auto t = cond_type(c, owner, env, span);
        if (t && *t != ValueType::boolean)
            error("condition-type", span, "condition '" + c.to_source() + "' is not boolean");
    }

    AvailabilityEnv check(const GlobalWorkflow& p, AvailabilityEnv env) {
        const auto& span = p.span();
        return std::visit(
            overloaded{
                [&](const gw::Epsilon&) { return env; },
                [&](const gw::Msg& m) {
                    check_name(m.from, span);
                    check_name(m.to, span);
                    if (m.from == m.to)
                        error("self-channel", span,
                              "message from " + m.from.name() +
                                  " to itself: self channels are not allowed");
                    for (const auto& x : m.send) require_available(env, m.from, x, span);
                    auto mismatch = check_payload_match(
                        m.send, m.recv,
                        [&](const std::string& v) { return env.type_of(m.from, v); },
                        [&](const std::string& v) { return known_type(m.to, v); });
                    if (mismatch) {
                        static const char* codes[] = {"payload-length", "payload-constant",
                                                      "payload-type"};
                        error(codes[static_cast<int>(mismatch->kind)], span, mismatch->message);
                        return env;
                    }
                    for (std::size_t i = 0; i < m.recv.size(); ++i) {
                        const auto& y = m.recv[i];
                        if (y.is_const()) continue;
                        const auto& x = m.send[i];
                        std::optional<ValueType> t = x.is_const()
                                                         ? std::optional(x.value().type())
                                                         : env.type_of(m.from, x.var_name());
                        if (!t) t = known_type(m.to, y.var_name());
                        if (!t) continue;
                        if (declare(m.to, y.var_name(), *t, span)) env.bind(m.to, y.var_name(), *t);
                    }
                    return env;
                },
                [&](const gw::Act& a) {
                    check_name(a.at, span);
                    for (const auto& x : a.inputs) require_available(env, a.at, x, span);
                    auto it = actions_.find(a.action);
                    if (it == actions_.end()) {
                        error("unknown-action", span, "unknown action '" + a.action + "'");
                        return env;
                    }
                    const auto& decl = it->second;
                    if (decl.inputs.size() != a.inputs.size()) {
                        error("arity", span,
                              "action '" + a.action + "' expects " +
                                  std::to_string(decl.inputs.size()) + " inputs, got " +
                                  std::to_string(a.inputs.size()));
                    } else {
                        for (std::size_t i = 0; i < a.inputs.size(); ++i) {
                            const auto& x = a.inputs[i];
                            auto have = x.is_const() ? std::optional(x.value().type())
                                                     : env.type_of(a.at, x.var_name());
                            if (have && *have != decl.inputs[i].type)
                                error("input-type", span,
                                      "input " + std::to_string(i + 1) + " of '" + a.action +
                                          "' must be " +
                                          std::string(type_name(decl.inputs[i].type)) +
                                          ", got " + std::string(type_name(*have)));
                        }
                    }
                    if (decl.outputs.size() != a.outputs.size()) {
                        error("arity", span,
                              "action '" + a.action + "' produces " +
                                  std::to_string(decl.outputs.size()) + " outputs, bound to " +
                                  std::to_string(a.outputs.size()) + " variables");
                        return env;
                    }
                    for (std::size_t i = 0; i < a.outputs.size(); ++i) {
                        const auto& y = a.outputs[i];
                        if (!y.is_var()) {
                            error("output-constant", span, "action outputs must be variables");
                            continue;
                        }
                        if (declare(a.at, y.var_name(), decl.outputs[i].type, span))
                            env.bind(a.at, y.var_name(), decl.outputs[i].type);
                    }
                    return env;
                },
                [&](const gw::Seq& s) { return check(s.second, check(s.first, env)); },
                [&](const gw::If& i) {
                    check_name(i.owner, span);
                    check_condition(i.cond, i.owner, env, span);
                    auto t = check(i.then_branch, env);
                    auto e = check(i.else_branch, env);
                    return AvailabilityEnv::intersect(t, e);
                },
                [&](const gw::While& w) {
                    check_name(w.owner, span);
                    check_condition(w.cond, w.owner, env, span);
                    // The body may run zero times, so its bindings do not flow on.
                    check(w.body, env);
                    return check(w.exit, env);
                },
            },
            p.node().v);
    }

    // Post-pass: every variable the projection will reference has a type.
    void assert_symbols_typed(const GlobalWorkflow& p) {
        auto need = [&](const Lifeline& at, const Payload& xs) {
            for (const auto& x : xs)
                if (x.is_var() && !known_type(at, x.var_name()))
                    throw Error(Errc::invariant, "typecheck post-pass: '" + x.var_name() + "' at " +
                                                     at.name() + " has no type");
        };
        std::visit(overloaded{
                       [](const gw::Epsilon&) {},
                       [&](const gw::Msg& m) {
                           need(m.from, m.send);
                           need(m.to, m.recv);
                       },
                       [&](const gw::Act& a) {
                           need(a.at, a.inputs);
                           need(a.at, a.outputs);
                       },
                       [&](const gw::Seq& s) {
                           assert_symbols_typed(s.first);
                           assert_symbols_typed(s.second);
                       },
                       [&](const gw::If& i) {
                           std::set<std::string> vs;
                           i.cond.collect_vars(vs);
                           for (const auto& v : vs) need(i.owner, {Atom::var(v)});
                           assert_symbols_typed(i.then_branch);
                           assert_symbols_typed(i.else_branch);
                       },
                       [&](const gw::While& w) {
                           std::set<std::string> vs;
                           w.cond.collect_vars(vs);
                           for (const auto& v : vs) need(w.owner, {Atom::var(v)});
                           assert_symbols_typed(w.body);
                           assert_symbols_typed(w.exit);
                       },
                   },
                   p.node().v);
    }

    const WorkflowDecl& decl_;
    const ActionRegistry& actions_;
    std::vector<Diagnostic> diags_;
    VarTypes types_;
};

} // namespace

TypeCheckResult typecheck(const WorkflowDecl& decl, const ActionRegistry& actions) {
    return Checker(decl, actions).run();
}

std::vector<Diagnostic> check_well_typed(const WorkflowDecl& decl,
                                         const std::vector<ActionDecl>& actions) {
    return typecheck(decl, make_registry(actions)).diagnostics;
}

} // namespace mscflow
