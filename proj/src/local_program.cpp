#include "mscflow/local_program.hpp"

#include "mscflow/error.hpp"
#include "mscflow/parser.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

LocalProgram make(decltype(LNode::v) v) {
    return LocalProgram(std::make_shared<const LNode>(LNode{std::move(v)}));
}

const LocalProgram& shared_epsilon() {
    static const LocalProgram eps(std::make_shared<const LNode>(LNode{lp::Epsilon{}}));
    return eps;
}

} // namespace

LocalProgram::LocalProgram() : node_(shared_epsilon().node_) {}

bool LocalProgram::is_epsilon() const { return as<lp::Epsilon>() != nullptr; }

bool operator==(const LocalProgram& a, const LocalProgram& b) {
    return a.node_ == b.node_ || a.node_->v == b.node_->v;
}

namespace lp {

LocalProgram epsilon() { return LocalProgram(); }
LocalProgram send(Payload payload, Lifeline to, std::optional<ControlTag> control) {
    return make(Send{std::move(payload), std::move(to), std::move(control)});
}
LocalProgram recv(Payload payload, Lifeline from, std::optional<ControlTag> control) {
    return make(Recv{std::move(payload), std::move(from), std::move(control)});
}
LocalProgram act(Payload outputs, std::string action, Payload inputs) {
    return make(Act{std::move(outputs), std::move(action), std::move(inputs)});
}
LocalProgram seq(LocalProgram first, LocalProgram second) {
    return make(Seq{std::move(first), std::move(second)});
}
LocalProgram seq(std::vector<LocalProgram> items) {
    if (items.empty()) return epsilon();
    LocalProgram out = items.back();
    for (std::size_t i = items.size() - 1; i-- > 0;) out = seq(items[i], out);
    return out;
}
LocalProgram if_owned(Condition cond, LocalProgram t, LocalProgram e, ControlTag tag) {
    return make(IfOwned{std::move(cond), std::move(t), std::move(e), std::move(tag)});
}
LocalProgram if_recv(Lifeline from, ControlTag tag, std::string bound_var, LocalProgram t,
                     LocalProgram e) {
    return make(IfRecv{std::move(from), std::move(tag), std::move(bound_var), std::move(t),
                       std::move(e)});
}
LocalProgram while_owned(Condition cond, LocalProgram body, LocalProgram exit, ControlTag tag) {
    return make(WhileOwned{std::move(cond), std::move(body), std::move(exit), std::move(tag)});
}
LocalProgram while_recv(Lifeline from, ControlTag tag, std::string bound_var, LocalProgram body,
                        LocalProgram exit) {
    return make(WhileRecv{std::move(from), std::move(tag), std::move(bound_var), std::move(body),
                          std::move(exit)});
}

} // namespace lp

std::size_t node_count(const LocalProgram& s) {
    return std::visit(overloaded{
                          [](const lp::Seq& x) {
                              return 1 + node_count(x.first) + node_count(x.second);
                          },
                          [](const lp::IfOwned& x) {
                              return 1 + node_count(x.then_branch) + node_count(x.else_branch);
                          },
                          [](const lp::IfRecv& x) {
                              return 1 + node_count(x.then_branch) + node_count(x.else_branch);
                          },
                          [](const lp::WhileOwned& x) {
                              return 1 + node_count(x.body) + node_count(x.exit);
                          },
                          [](const lp::WhileRecv& x) {
                              return 1 + node_count(x.body) + node_count(x.exit);
                          },
                          [](const auto&) -> std::size_t { return 1; },
                      },
                      s.node().v);
}

std::size_t node_count(const DistributedProgram& d) {
    std::size_t n = 0;
    for (const auto& [_, s] : d) n += node_count(s);
    return n;
}

namespace {

std::string ctrl_suffix(const std::optional<ControlTag>& c) {
    return c ? " [ctrl " + c->str() + "]" : std::string();
}

class TextPrinter {
public:
    std::string out;

    void line(int indent, const std::string& text) {
        out += std::string(static_cast<std::size_t>(indent) * 4, ' ') + text + "\n";
    }

    void items(const LocalProgram& s, int indent) {
        if (auto q = s.as<lp::Seq>()) {
            items(q->first, indent);
            items(q->second, indent);
            return;
        }
        statement(s, indent);
    }

    void statement(const LocalProgram& s, int indent) {
        std::visit(
            overloaded{
                [&](const lp::Epsilon&) { line(indent, "epsilon"); },
                [&](const lp::Send& x) {
                    line(indent, "send (" + payload_to_source(x.payload) + ") -> " +
                                     x.to.name() + ctrl_suffix(x.control));
                },
                [&](const lp::Recv& x) {
                    line(indent, "recv (" + payload_to_source(x.payload) + ") <- " +
                                     x.from.name() + ctrl_suffix(x.control));
                },
                [&](const lp::Act& x) {
                    line(indent, "act (" + payload_to_source(x.outputs) + ") = " + x.action +
                                     "(" + payload_to_source(x.inputs) + ")");
                },
                [&](const lp::Seq&) { items(s, indent); },
                [&](const lp::IfOwned& x) {
                    line(indent, "if " + x.cond.to_source() + " then {");
                    items(x.then_branch, indent + 1);
                    line(indent, "} else {");
                    items(x.else_branch, indent + 1);
                    line(indent, "}");
                },
                [&](const lp::IfRecv& x) {
                    line(indent, "if recv (" + x.bound_var + ") <- " + x.from.name() +
                                     " [ctrl " + x.tag.str() + "] then {");
                    items(x.then_branch, indent + 1);
                    line(indent, "} else {");
                    items(x.else_branch, indent + 1);
                    line(indent, "}");
                },
                [&](const lp::WhileOwned& x) {
                    line(indent, "while " + x.cond.to_source() + " do {");
                    items(x.body, indent + 1);
                    line(indent, "} exit {");
                    items(x.exit, indent + 1);
                    line(indent, "}");
                },
                [&](const lp::WhileRecv& x) {
                    line(indent, "while recv (" + x.bound_var + ") <- " + x.from.name() +
                                     " [ctrl " + x.tag.str() + "] do {");
                    items(x.body, indent + 1);
                    line(indent, "} exit {");
                    items(x.exit, indent + 1);
                    line(indent, "}");
                },
            },
            s.node().v);
    }
};

nlohmann::json payload_json(const Payload& p) {
    auto a = nlohmann::json::array();
    for (const auto& x : p) a.push_back(x.to_json());
    return a;
}

Payload payload_from(const nlohmann::json& j) {
    Payload p;
    for (const auto& x : j) p.push_back(Atom::from_json(x));
    return p;
}

Condition condition_from(const nlohmann::json& j) {
    auto r = parse_condition(j.get<std::string>());
    if (!r.ok()) throw Error(Errc::syntax, "bad condition '" + j.get<std::string>() + "'");
    return *r.value;
}

} // namespace

std::string to_text(const LocalProgram& s, int indent) {
    TextPrinter p;
    p.items(s, indent);
    return p.out;
}

std::string to_text(const DistributedProgram& d) {
    std::string out;
    for (const auto& [l, s] : d) {
        out += "program " + l.name() + " {\n";
        out += to_text(s, 1);
        out += "}\n";
    }
    return out;
}

nlohmann::json to_json(const LocalProgram& s) {
    return std::visit(
        overloaded{
            [](const lp::Epsilon&) { return nlohmann::json{{"kind", "epsilon"}}; },
            [](const lp::Send& x) {
                nlohmann::json j{{"kind", "send"}, {"payload", payload_json(x.payload)},
                                 {"to", x.to.name()}};
                if (x.control) j["control"] = x.control->str();
                return j;
            },
            [](const lp::Recv& x) {
                nlohmann::json j{{"kind", "recv"}, {"payload", payload_json(x.payload)},
                                 {"from", x.from.name()}};
                if (x.control) j["control"] = x.control->str();
                return j;
            },
            [](const lp::Act& x) {
                return nlohmann::json{{"kind", "act"},
                                      {"outputs", payload_json(x.outputs)},
                                      {"action", x.action},
                                      {"inputs", payload_json(x.inputs)}};
            },
            [](const lp::Seq& x) {
                return nlohmann::json{
                    {"kind", "seq"}, {"first", to_json(x.first)}, {"second", to_json(x.second)}};
            },
            [](const lp::IfOwned& x) {
                return nlohmann::json{{"kind", "if"},
                                      {"cond", x.cond.to_source()},
                                      {"tag", x.tag.str()},
                                      {"then", to_json(x.then_branch)},
                                      {"else", to_json(x.else_branch)}};
            },
            [](const lp::IfRecv& x) {
                return nlohmann::json{{"kind", "if_recv"},
                                      {"from", x.from.name()},
                                      {"tag", x.tag.str()},
                                      {"var", x.bound_var},
                                      {"then", to_json(x.then_branch)},
                                      {"else", to_json(x.else_branch)}};
            },
            [](const lp::WhileOwned& x) {
                return nlohmann::json{{"kind", "while"},
                                      {"cond", x.cond.to_source()},
                                      {"tag", x.tag.str()},
                                      {"body", to_json(x.body)},
                                      {"exit", to_json(x.exit)}};
            },
            [](const lp::WhileRecv& x) {
                return nlohmann::json{{"kind", "while_recv"},
                                      {"from", x.from.name()},
                                      {"tag", x.tag.str()},
                                      {"var", x.bound_var},
                                      {"body", to_json(x.body)},
                                      {"exit", to_json(x.exit)}};
            },
        },
        s.node().v);
}

LocalProgram local_program_from_json(const nlohmann::json& j) {
    try {
        const auto kind = j.at("kind").get<std::string>();
        auto control = [&]() -> std::optional<ControlTag> {
            if (j.contains("control")) return ControlTag(j["control"].get<std::string>());
            return std::nullopt;
        };
        if (kind == "epsilon") return lp::epsilon();
        if (kind == "send")
            return lp::send(payload_from(j.at("payload")), Lifeline(j.at("to").get<std::string>()),
                            control());
        if (kind == "recv")
            return lp::recv(payload_from(j.at("payload")),
                            Lifeline(j.at("from").get<std::string>()), control());
        if (kind == "act")
            return lp::act(payload_from(j.at("outputs")), j.at("action").get<std::string>(),
                           payload_from(j.at("inputs")));
        if (kind == "seq")
            return lp::seq(local_program_from_json(j.at("first")),
                           local_program_from_json(j.at("second")));
        if (kind == "if")
            return lp::if_owned(condition_from(j.at("cond")),
                                local_program_from_json(j.at("then")),
                                local_program_from_json(j.at("else")),
                                ControlTag(j.value("tag", std::string())));
        if (kind == "if_recv")
            return lp::if_recv(Lifeline(j.at("from").get<std::string>()),
                               ControlTag(j.at("tag").get<std::string>()),
                               j.at("var").get<std::string>(),
                               local_program_from_json(j.at("then")),
                               local_program_from_json(j.at("else")));
        if (kind == "while")
            return lp::while_owned(condition_from(j.at("cond")),
                                   local_program_from_json(j.at("body")),
                                   local_program_from_json(j.at("exit")),
                                   ControlTag(j.value("tag", std::string())));
        if (kind == "while_recv")
            return lp::while_recv(Lifeline(j.at("from").get<std::string>()),
                                  ControlTag(j.at("tag").get<std::string>()),
                                  j.at("var").get<std::string>(),
                                  local_program_from_json(j.at("body")),
                                  local_program_from_json(j.at("exit")));
        throw Error(Errc::syntax, "unknown local program node '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::syntax, std::string("malformed local program: ") + e.what());
    }
}

nlohmann::json to_json(const DistributedProgram& d) {
    auto j = nlohmann::json::object();
    for (const auto& [l, s] : d) j[l.name()] = to_json(s);
    return j;
}

DistributedProgram distributed_program_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::syntax, "distributed program must be an object");
    DistributedProgram d;
    for (const auto& [name, s] : j.items()) d[Lifeline(name)] = local_program_from_json(s);
    return d;
}

} // namespace mscflow
