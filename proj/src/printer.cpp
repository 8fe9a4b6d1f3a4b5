#include <sstream>

#include "mscflow/parser.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string quote(const std::string& s) { return Value::string(s).to_source(); }

class Printer {
public:
    explicit Printer(std::ostringstream& out) : out_(out) {}

    void line(int indent, const std::string& text) {
        out_ << std::string(static_cast<std::size_t>(indent) * 4, ' ') << text << '\n';
    }

    // Prints a statement list. A Seq in first position needs its own braces
    // so that re-parsing rebuilds the same nesting.
    void items(const GlobalWorkflow& p, int indent) {
        if (auto s = p.as<gw::Seq>()) {
            if (s->first.as<gw::Seq>()) {
                line(indent, "{");
                items(s->first, indent + 1);
                line(indent, "}");
            } else {
                statement(s->first, indent);
            }
            items(s->second, indent);
            return;
        }
        statement(p, indent);
    }

    void block_body(const GlobalWorkflow& p, int indent) { items(p, indent); }

    void statement(const GlobalWorkflow& p, int indent) {
        std::visit(
            overloaded{
                [&](const gw::Epsilon&) { line(indent, "epsilon"); },
                [&](const gw::Msg& m) {
                    line(indent, "msg " + m.from.name() + "(" + payload_to_source(m.send) +
                                     ") -> " + m.to.name() + "(" + payload_to_source(m.recv) +
                                     ")");
                },
                [&](const gw::Act& a) {
                    std::string outs = payload_to_source(a.outputs);
                    if (a.outputs.size() != 1) outs = "(" + outs + ")";
                    line(indent, "act " + a.at.name() + " : " + outs + " = " + a.action + "(" +
                                     payload_to_source(a.inputs) + ")");
                },
                [&](const gw::Seq&) {
                    line(indent, "{");
                    items(p, indent + 1);
                    line(indent, "}");
                },
                [&](const gw::If& i) {
                    line(indent, "if " + i.cond.to_source() + "@" + i.owner.name() + " then {");
                    block_body(i.then_branch, indent + 1);
                    if (i.else_branch.is_epsilon()) {
                        line(indent, "}");
                    } else {
                        line(indent, "} else {");
                        block_body(i.else_branch, indent + 1);
                        line(indent, "}");
                    }
                },
                [&](const gw::While& w) {
                    line(indent, "while (" + w.cond.to_source() + ")@" + w.owner.name() + " {");
                    block_body(w.body, indent + 1);
                    line(indent, "} exit {");
                    block_body(w.exit, indent + 1);
                    line(indent, "}");
                },
            },
            p.node().v);
    }

private:
    std::ostringstream& out_;
};

std::string typed_list(const std::vector<TypedName>& xs) {
    std::string s = "(";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += xs[i].name + ": " + std::string(type_name(xs[i].type));
    }
    return s + ")";
}

std::string word_list(const std::vector<std::string>& xs, bool quoted) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += quoted ? quote(xs[i]) : xs[i];
    }
    return s + "]";
}

} // namespace

std::string pretty_print(const GlobalWorkflow& body, int indent) {
    std::ostringstream out;
    if (!body.is_epsilon()) Printer(out).items(body, indent);
    return out.str();
}

std::string pretty_print(const WorkflowDecl& d) {
    std::ostringstream out;
    Printer pr(out);
    std::string header = "workflow " + d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
        const auto& p = d.params[i];
        if (i) header += ", ";
        header += p.name + ": " + std::string(type_name(p.type)) + " @ " + p.owner.name();
    }
    header += ")";
    if (d.return_type) header += " -> " + std::string(type_name(*d.return_type));
    pr.line(0, header + " {");
    for (const auto& v : d.vars) {
        pr.line(1, "var " + v.name + ": " + std::string(type_name(v.type)) + " = " +
                       (v.initial ? v.initial->to_source() : std::string("\"\"")) + " @ " +
                       v.owner.name());
    }
    // A top-level epsilon body prints as nothing.
    if (!d.body.is_epsilon()) pr.items(d.body, 1);
    pr.line(1, "return " + d.return_var + " @ " + d.return_at.name());
    pr.line(0, "}");
    return out.str();
}

std::string pretty_print(const ActionDecl& a) {
    std::ostringstream out;
    Printer pr(out);
    std::string head = std::string(to_string(a.kind)) + " " + a.name + typed_list(a.inputs) +
                       " -> " + typed_list(a.outputs);
    switch (a.kind) {
    case ActionKind::pure: pr.line(0, head); break;
    case ActionKind::llm:
        pr.line(0, head + " {");
        pr.line(1, "system: " + quote(a.system_template));
        pr.line(1, "user: " + quote(a.user_template));
        pr.line(1, "parse: " + a.parse_mode);
        pr.line(0, "}");
        break;
    case ActionKind::planner: {
        pr.line(0, head + " {");
        pr.line(1, "description: " + quote(a.description));
        std::vector<std::string> names;
        for (const auto& l : a.lifelines) names.push_back(l.name());
        pr.line(1, "lifelines: " + word_list(names, false));
        pr.line(1, "allow: " + word_list(a.allow, true));
        if (!a.instructions.empty()) pr.line(1, "instructions: " + quote(a.instructions));
        if (!a.vocabulary.empty()) pr.line(1, "actions: " + word_list(a.vocabulary, false));
        pr.line(0, "}");
        break;
    }
    }
    return out.str();
}

} // namespace mscflow
