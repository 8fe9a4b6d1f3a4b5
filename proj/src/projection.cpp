#include "mscflow/projection.hpp"

#include <algorithm>

#include "mscflow/error.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// The ⊏-ordered send product followed by the projected branch; an empty
// product contributes nothing.
LocalProgram broadcast_then(const std::vector<Lifeline>& recipients, bool value,
                            const ControlTag& tag, LocalProgram rest) {
    for (auto it = recipients.rbegin(); it != recipients.rend(); ++it)
        rest = lp::seq(lp::send({Atom::constant(Value::boolean(value))}, *it, tag), rest);
    return rest;
}

void require_tag(const ControlTag& tag) {
    if (tag.empty())
        throw Error(Errc::contract, "projection of an untagged control construct");
}

} // namespace

std::string control_var_name(const ControlTag& tag) {
    std::string s = tag.str();
    std::replace(s.begin(), s.end(), '.', '_');
    return std::string(kReservedPrefix) + "_" + s;
}

std::vector<Lifeline> recipient_set(const Lifeline& owner, const GlobalWorkflow& a,
                                    const GlobalWorkflow& b) {
    auto ls = participation_set(a);
    auto more = participation_set(b);
    ls.insert(more.begin(), more.end());
    ls.erase(owner);
    return {ls.begin(), ls.end()};
}

LocalProgram project(const GlobalWorkflow& p, const Lifeline& a) {
    return std::visit(
        overloaded{
            [](const gw::Epsilon&) { return lp::epsilon(); },
            [&](const gw::Msg& m) {
                if (a == m.from) return lp::send(m.send, m.to);
                if (a == m.to) return lp::recv(m.recv, m.from);
                return lp::epsilon();
            },
            [&](const gw::Act& x) {
                if (a == x.at) return lp::act(x.outputs, x.action, x.inputs);
                return lp::epsilon();
            },
            [&](const gw::Seq& s) { return lp::seq(project(s.first, a), project(s.second, a)); },
            [&](const gw::If& i) {
                require_tag(i.tag);
                auto r = recipient_set(i.owner, i.then_branch, i.else_branch);
                if (a == i.owner) {
                    return lp::if_owned(
                        i.cond, broadcast_then(r, true, i.tag, project(i.then_branch, a)),
                        broadcast_then(r, false, i.tag, project(i.else_branch, a)), i.tag);
                }
                if (std::find(r.begin(), r.end(), a) != r.end()) {
                    return lp::if_recv(i.owner, i.tag, control_var_name(i.tag),
                                       project(i.then_branch, a), project(i.else_branch, a));
                }
                return lp::epsilon();
            },
            [&](const gw::While& w) {
                require_tag(w.tag);
                auto r = recipient_set(w.owner, w.body, w.exit);
                if (a == w.owner) {
                    return lp::while_owned(w.cond,
                                           broadcast_then(r, true, w.tag, project(w.body, a)),
                                           broadcast_then(r, false, w.tag, project(w.exit, a)),
                                           w.tag);
                }
                if (std::find(r.begin(), r.end(), a) != r.end()) {
                    return lp::while_recv(w.owner, w.tag, control_var_name(w.tag),
                                          project(w.body, a), project(w.exit, a));
                }
                return lp::epsilon();
            },
        },
        p.node().v);
}

DistributedProgram project_all(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines) {
    auto ls = lifelines.empty() ? participation_set(p) : lifelines;
    DistributedProgram d;
    for (const auto& l : ls) d[l] = project(p, l);
    return d;
}

DistributedProgram project_all(const WorkflowDecl& decl) {
    return project_all(decl.body, decl.lifelines());
}

MscTuple decision_block(const Lifeline& owner, bool value, const ControlTag& tag,
                        const std::set<Lifeline>& recipients, DecisionKind kind,
                        const Condition& cond, const std::set<Lifeline>& universe) {
    if (recipients.count(owner))
        throw Error(Errc::contract, "decision owner " + owner.name() + " among its recipients");
    std::set<Lifeline> ls = universe;
    ls.insert(owner);
    ls.insert(recipients.begin(), recipients.end());
    MscTuple m(ls);
    ChoiceKind ck = kind == DecisionKind::if_
                        ? (value ? ChoiceKind::if_true : ChoiceKind::if_false)
                        : (value ? ChoiceKind::while_true : ChoiceKind::while_false);
    m.append(Letter::choice(ck, cond, owner));
    Payload nu{Atom::constant(Value::boolean(value))};
    for (const auto& r : recipients) {
        m.append(Letter::send(owner, nu, r, tag));
        m.append(Letter::recv(r, nu, owner, tag));
    }
    return m;
}

} // namespace mscflow
