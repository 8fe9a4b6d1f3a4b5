#include "mscflow/runtime.hpp"

#include <random>
#include <sstream>

#include "mscflow/error.hpp"
#include "mscflow/planner.hpp"
#include "runtime_internal.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Payload as_constants(const std::vector<Value>& vs) {
    Payload p;
    for (const auto& v : vs) p.push_back(Atom::constant(v));
    return p;
}

nlohmann::json values_json(const std::vector<Value>& vs) {
    auto a = nlohmann::json::array();
    for (const auto& v : vs) a.push_back(v.to_json());
    return a;
}

} // namespace

Letter TraceEvent::concrete() const {
    switch (letter.kind()) {
    case Letter::Kind::send:
    case Letter::Kind::recv: return letter.with_atoms(as_constants(values), {});
    case Letter::Kind::action: return letter.with_atoms(as_constants(values), as_constants(inputs));
    case Letter::Kind::choice: break;
    }
    return letter;
}

nlohmann::json TraceEvent::to_json() const {
    nlohmann::json j{{"seq", seq},
                     {"lifeline", letter.at().name()},
                     {"letter", letter.to_json()},
                     {"values", values_json(values)}};
    if (letter.kind() == Letter::Kind::action) j["inputs"] = values_json(inputs);
    return j;
}

std::string log_to_ndjson(const std::vector<TraceEvent>& log) {
    std::string out;
    for (const auto& e : log) out += e.to_json().dump() + "\n";
    return out;
}

bool Configuration::final() const {
    for (const auto& [_, a] : agents)
        if (!a.done()) return false;
    return true;
}

namespace detail {

void normalize(AgentState& a) {
    while (!a.stack.empty()) {
        LocalProgram top = a.stack.back();
        if (top.is_epsilon()) {
            a.stack.pop_back();
        } else if (auto s = top.as<lp::Seq>()) {
            a.stack.pop_back();
            a.stack.push_back(s->second);
            a.stack.push_back(s->first);
        } else {
            break;
        }
    }
}

const std::deque<Message>* channel(const Configuration& c, const Lifeline& from,
                                   const Lifeline& to) {
    auto it = c.channels.find({from, to});
    return it == c.channels.end() ? nullptr : &it->second;
}

bool head_matches(const Configuration& c, const Lifeline& from, const Lifeline& to,
                  const std::optional<ControlTag>& control) {
    const auto* q = channel(c, from, to);
    return q && !q->empty() && q->front().control == control;
}

std::optional<EnabledStep> head_step(const Configuration& c, const Lifeline& at,
                                     const AgentState& a) {
    if (a.stack.empty()) return std::nullopt;
    const auto& top = a.stack.back();
    return std::visit(
        overloaded{
            [&](const lp::Send& x) -> std::optional<EnabledStep> {
                return EnabledStep{at, StepKind::send, "send to " + x.to.name()};
            },
            [&](const lp::Recv& x) -> std::optional<EnabledStep> {
                if (!head_matches(c, x.from, at, x.control)) return std::nullopt;
                return EnabledStep{at, StepKind::recv, "recv from " + x.from.name()};
            },
            [&](const lp::Act& x) -> std::optional<EnabledStep> {
                return EnabledStep{at, StepKind::action, "act " + x.action};
            },
            [&](const lp::IfOwned& x) -> std::optional<EnabledStep> {
                return EnabledStep{at, StepKind::choice, "if " + x.cond.to_source()};
            },
            [&](const lp::WhileOwned& x) -> std::optional<EnabledStep> {
                return EnabledStep{at, StepKind::choice, "while " + x.cond.to_source()};
            },
            [&](const lp::IfRecv& x) -> std::optional<EnabledStep> {
                if (!head_matches(c, x.from, at, x.tag)) return std::nullopt;
                return EnabledStep{at, StepKind::control_recv,
                                   "if-recv " + x.tag.str() + " from " + x.from.name()};
            },
            [&](const lp::WhileRecv& x) -> std::optional<EnabledStep> {
                if (!head_matches(c, x.from, at, x.tag)) return std::nullopt;
                return EnabledStep{at, StepKind::control_recv,
                                   "while-recv " + x.tag.str() + " from " + x.from.name()};
            },
            [&](const auto&) -> std::optional<EnabledStep> {
                throw Error(Errc::invariant, "continuation of " + at.name() + " not normalized");
            },
        },
        top.node().v);
}

const Value& read(const AgentState& a, const Lifeline& at, const std::string& name) {
    auto it = a.store.find(name);
    if (it == a.store.end())
        throw Error(Errc::read_before_write,
                    "variable '" + name + "' read at " + at.name() + " before it was written");
    return it->second;
}

std::vector<Value> eval(const AgentState& a, const Lifeline& at, const Payload& p) {
    std::vector<Value> out;
    for (const auto& x : p) out.push_back(x.is_var() ? read(a, at, x.var_name()) : x.value());
    return out;
}

bool eval_cond(const AgentState& a, const Lifeline& at, const Condition& cond) {
    auto v = cond.evaluate([&](const std::string& n) { return read(a, at, n); });
    if (v.type() != ValueType::boolean)
        throw Error(Errc::type, "condition '" + cond.to_source() + "' at " + at.name() +
                                    " is not boolean");
    return v.as_boolean();
}

void record(Configuration& c, Letter letter, std::vector<Value> values,
            std::vector<Value> inputs) {
    c.log.push_back(TraceEvent{c.next_seq++, std::move(letter), std::move(values),
                               std::move(inputs)});
}

Message dequeue(Configuration& c, const Lifeline& from, const Lifeline& to) {
    auto& q = c.channels[{from, to}];
    Message m = std::move(q.front());
    q.pop_front();
    return m;
}

void bind_received(AgentState& a, const Lifeline& at, const Lifeline& from, const Payload& recv,
                   const std::vector<Value>& values) {
    if (recv.size() != values.size())
        throw Error(Errc::receiver_constant_mismatch,
                    at.name() + " expected " + std::to_string(recv.size()) + " values from " +
                        from.name() + ", got " + std::to_string(values.size()));
    for (std::size_t i = 0; i < recv.size(); ++i) {
        if (recv[i].is_const()) {
            if (!(recv[i].value() == values[i]))
                throw Error(Errc::receiver_constant_mismatch,
                            at.name() + " expected constant " + recv[i].value().to_source() +
                                " at index " + std::to_string(i + 1) + " from " + from.name() +
                                ", received " + values[i].to_source());
        }
    }
    for (std::size_t i = 0; i < recv.size(); ++i)
        if (recv[i].is_var()) a.store[recv[i].var_name()] = values[i];
}

bool control_value(const Message& m, const Lifeline& at) {
    if (m.values.size() != 1 || m.values[0].type() != ValueType::boolean)
        throw Error(Errc::receiver_constant_mismatch,
                    "malformed control message received at " + at.name());
    return m.values[0].as_boolean();
}

std::vector<Value> run_action(AgentState& a, const Lifeline& at, const lp::Act& x,
                              const std::vector<Value>& inputs, const StepContext& ctx) {
    if (!ctx.actions) throw Error(Errc::contract, "step without action declarations");
    auto it = ctx.actions->find(x.action);
    if (it == ctx.actions->end())
        throw Error(Errc::unknown_action, "unknown action '" + x.action + "' at " + at.name());
    const auto& decl = it->second;
    auto& count = a.invocations[x.action];
    std::vector<Value> out;
    if (decl.kind == ActionKind::planner) {
        PlanOptions po;
        po.caller = at;
        po.invocation = count;
        po.depth = ctx.planner_depth;
        po.max_depth = ctx.max_planner_depth;
        out = {plan_and_run(decl, inputs, *ctx.backend, *ctx.actions, po).result};
    } else {
        if (!ctx.backend) throw Error(Errc::contract, "step without an action backend");
        out = ctx.backend->invoke(decl, inputs, InvocationContext{at, count});
    }
    ++count;
    check_outputs(decl, out);
    if (out.size() != x.outputs.size())
        throw Error(Errc::backend_type_mismatch,
                    "action '" + x.action + "' output count differs from its binding");
    return out;
}

} // namespace detail

using namespace detail;

std::string_view to_string(StepKind k) noexcept {
    switch (k) {
    case StepKind::send: return "send";
    case StepKind::recv: return "recv";
    case StepKind::action: return "action";
    case StepKind::choice: return "choice";
    case StepKind::control_recv: return "control_recv";
    }
    return "?";
}

Configuration initial_configuration(const DistributedProgram& d, const WorkflowDecl& decl,
                                    const Inputs& inputs) {
    Configuration c;
    for (const auto& [l, s] : d) {
        auto& a = c.agents[l];
        a.stack.push_back(s);
        normalize(a);
    }
    for (const auto& l : decl.lifelines()) c.agents[l];

    std::set<std::string> used;
    for (const auto& p : decl.params) {
        std::string qualified = p.owner.name() + "." + p.name;
        auto it = inputs.find(qualified);
        if (it == inputs.end()) it = inputs.find(p.name);
        if (it == inputs.end())
            throw Error(Errc::input, "missing input '" + p.name + "' for " + p.owner.name());
        if (it->second.type() != p.type)
            throw Error(Errc::input, "input '" + p.name + "' must be " +
                                         std::string(type_name(p.type)) + ", got " +
                                         std::string(type_name(it->second.type())));
        used.insert(it->first);
        c.agents[p.owner].store[p.name] = it->second;
    }
    for (const auto& [k, _] : inputs)
        if (!used.count(k)) throw Error(Errc::input, "unknown input '" + k + "'");
    for (const auto& v : decl.vars) {
        if (v.initial) c.agents[v.owner].store[v.name] = *v.initial;
    }
    return c;
}

std::vector<EnabledStep> enabled_steps(const Configuration& c) {
    std::vector<EnabledStep> out;
    for (const auto& [l, a] : c.agents)
        if (auto s = head_step(c, l, a)) out.push_back(std::move(*s));
    return out;
}

void apply_step(Configuration& c, const Lifeline& at, const StepContext& ctx) {
    auto ait = c.agents.find(at);
    if (ait == c.agents.end()) throw Error(Errc::contract, "no lifeline " + at.name());
    auto& a = ait->second;
    if (!head_step(c, at, a))
        throw Error(Errc::contract, "lifeline " + at.name() + " is not enabled");
    LocalProgram top = a.stack.back();
    a.stack.pop_back();
    std::visit(
        overloaded{
            [&](const lp::Send& x) {
                auto values = eval(a, at, x.payload);
                c.channels[{at, x.to}].push_back(Message{values, x.control});
                record(c, Letter::send(at, x.payload, x.to, x.control), std::move(values));
            },
            [&](const lp::Recv& x) {
                auto m = dequeue(c, x.from, at);
                bind_received(a, at, x.from, x.payload, m.values);
                record(c, Letter::recv(at, x.payload, x.from, x.control), std::move(m.values));
            },
            [&](const lp::Act& x) {
                auto inputs = eval(a, at, x.inputs);
                auto outs = run_action(a, at, x, inputs, ctx);
                for (std::size_t i = 0; i < x.outputs.size(); ++i)
                    a.store[x.outputs[i].var_name()] = outs[i];
                record(c, Letter::action(at, x.outputs, x.action, x.inputs), std::move(outs),
                       std::move(inputs));
            },
            [&](const lp::IfOwned& x) {
                bool v = eval_cond(a, at, x.cond);
                record(c,
                       Letter::choice(v ? ChoiceKind::if_true : ChoiceKind::if_false, x.cond, at),
                       {Value::boolean(v)});
                a.stack.push_back(v ? x.then_branch : x.else_branch);
            },
            [&](const lp::WhileOwned& x) {
                bool v = eval_cond(a, at, x.cond);
                record(c,
                       Letter::choice(v ? ChoiceKind::while_true : ChoiceKind::while_false,
                                      x.cond, at),
                       {Value::boolean(v)});
                if (v) {
                    a.stack.push_back(top);
                    a.stack.push_back(x.body);
                } else {
                    a.stack.push_back(x.exit);
                }
            },
            [&](const lp::IfRecv& x) {
                auto m = dequeue(c, x.from, at);
                bool v = control_value(m, at);
                a.store[x.bound_var] = Value::boolean(v);
                record(c, Letter::recv(at, {Atom::constant(Value::boolean(v))}, x.from, x.tag),
                       {Value::boolean(v)});
                a.stack.push_back(v ? x.then_branch : x.else_branch);
            },
            [&](const lp::WhileRecv& x) {
                auto m = dequeue(c, x.from, at);
                bool v = control_value(m, at);
                a.store[x.bound_var] = Value::boolean(v);
                record(c, Letter::recv(at, {Atom::constant(Value::boolean(v))}, x.from, x.tag),
                       {Value::boolean(v)});
                if (v) {
                    a.stack.push_back(top);
                    a.stack.push_back(x.body);
                } else {
                    a.stack.push_back(x.exit);
                }
            },
            [&](const auto&) { throw Error(Errc::invariant, "unexpected continuation head"); },
        },
        top.node().v);
    normalize(a);
}

Configuration step(Configuration c, const Lifeline& at, const StepContext& ctx) {
    apply_step(c, at, ctx);
    return c;
}

MscTuple trace_of(const std::vector<TraceEvent>& log, const std::set<Lifeline>& universe) {
    MscTuple m(universe);
    for (const auto& e : log) m.append(e.concrete());
    return m;
}

namespace {

std::string describe_stuck(const Configuration& c) {
    std::ostringstream out;
    out << "no lifeline can move:";
    for (const auto& [l, a] : c.agents) {
        if (a.done()) continue;
        out << "\n  " << l.name() << " waits at: " << to_text(a.stack.back()).substr(0, 80);
    }
    return out.str();
}

std::set<Lifeline> universe_of(const Configuration& c) {
    std::set<Lifeline> out;
    for (const auto& [l, _] : c.agents) out.insert(l);
    return out;
}

} // namespace

RunResult detail::finish_run(Configuration c, const WorkflowDecl& decl) {
    RunResult r;
    r.trace = trace_of(c.log, universe_of(c));
    auto chk = is_msc(r.trace);
    if (!chk) throw Error(Errc::invariant, "run trace is not an MSC: " + chk.violation->message);
    if (!all_sends_matched(r.trace))
        throw Error(Errc::invariant, "run trace is not complete: a message was never received");
    r.result = read(c.agents[decl.return_at], decl.return_at, decl.return_var);
    r.log = c.log;
    r.final_state = std::move(c);
    return r;
}

RunResult run(const DistributedProgram& d, const WorkflowDecl& decl, const Inputs& inputs,
              const ActionRegistry& actions, ActionBackend& backend, const RunOptions& options) {
    auto c = initial_configuration(d, decl, inputs);
    StepContext ctx{&actions, &backend, options.planner_depth, options.max_planner_depth};
    std::vector<Lifeline> order;
    for (const auto& [l, _] : c.agents) order.push_back(l);
    std::size_t cursor = order.size() - 1 + (order.empty() ? 1 : 0);
    std::mt19937_64 rng(options.scheduler.seed);
    std::size_t scripted = 0;

    for (std::size_t n = 0; !c.final(); ++n) {
        if (n >= options.max_steps)
            throw Error(Errc::resource_exceeded,
                        "run exceeded " + std::to_string(options.max_steps) + " steps");
        auto en = enabled_steps(c);
        if (en.empty()) throw Error(Errc::stuck, describe_stuck(c));
        Lifeline pick;
        const auto& sch = options.scheduler;
        if (sch.kind == Scheduler::Kind::script && scripted < sch.order.size()) {
            pick = sch.order[scripted++];
            bool ok = false;
            for (const auto& e : en) ok = ok || e.lifeline == pick;
            if (!ok)
                throw Error(Errc::contract, "scheduled lifeline " + pick.name() +
                                                " is not enabled at step " +
                                                std::to_string(n + 1));
        } else if (sch.kind == Scheduler::Kind::random) {
            std::uniform_int_distribution<std::size_t> dist(0, en.size() - 1);
            pick = en[dist(rng)].lifeline;
        } else {
            // Next enabled lifeline after the previous pick, cyclically.
            for (std::size_t k = 1; k <= order.size(); ++k) {
                std::size_t i = (cursor + k) % order.size();
                bool ok = false;
                for (const auto& e : en) ok = ok || e.lifeline == order[i];
                if (ok) {
                    cursor = i;
                    pick = order[i];
                    break;
                }
            }
        }
        apply_step(c, pick, ctx);
    }
    return finish_run(std::move(c), decl);
}

} // namespace mscflow
