#include "mscflow/workflow.hpp"

#include <functional>

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

GlobalWorkflow make(decltype(GNode::v) v, SourceSpan span) {
    return GlobalWorkflow(std::make_shared<const GNode>(GNode{std::move(v), span}));
}

} // namespace

GlobalWorkflow::GlobalWorkflow() : node_(std::make_shared<const GNode>(GNode{gw::Epsilon{}, {}})) {}

const SourceSpan& GlobalWorkflow::span() const noexcept { return node_->span; }

bool GlobalWorkflow::is_epsilon() const { return as<gw::Epsilon>() != nullptr; }

bool operator==(const GlobalWorkflow& a, const GlobalWorkflow& b) {
    return a.node_ == b.node_ || a.node_->v == b.node_->v;
}

namespace gw {

GlobalWorkflow epsilon(SourceSpan span) { return make(Epsilon{}, span); }

GlobalWorkflow msg(Lifeline from, Payload send, Lifeline to, Payload recv, SourceSpan span) {
    return make(Msg{std::move(from), std::move(to), std::move(send), std::move(recv)}, span);
}

GlobalWorkflow act(Lifeline at, Payload outputs, std::string action, Payload inputs,
                   SourceSpan span) {
    return make(Act{std::move(at), std::move(outputs), std::move(action), std::move(inputs)},
                span);
}

GlobalWorkflow seq(GlobalWorkflow first, GlobalWorkflow second, SourceSpan span) {
    return make(Seq{std::move(first), std::move(second)}, span);
}

GlobalWorkflow seq(std::vector<GlobalWorkflow> items) {
    if (items.empty()) return epsilon();
    GlobalWorkflow acc = items.back();
    for (auto it = items.rbegin() + 1; it != items.rend(); ++it) acc = seq(*it, acc);
    return acc;
}

GlobalWorkflow if_(Condition cond, Lifeline owner, GlobalWorkflow then_branch,
                   GlobalWorkflow else_branch, ControlTag tag, SourceSpan span) {
    return make(If{std::move(cond), std::move(owner), std::move(then_branch),
                   std::move(else_branch), std::move(tag)},
                span);
}

GlobalWorkflow while_(Condition cond, Lifeline owner, GlobalWorkflow body, GlobalWorkflow exit,
                      ControlTag tag, SourceSpan span) {
    return make(While{std::move(cond), std::move(owner), std::move(body), std::move(exit),
                      std::move(tag)},
                span);
}

} // namespace gw

std::set<Lifeline> participation_set(const GlobalWorkflow& p) {
    std::set<Lifeline> out;
    std::function<void(const GlobalWorkflow&)> walk = [&](const GlobalWorkflow& q) {
        std::visit(overloaded{
                       [](const gw::Epsilon&) {},
                       [&](const gw::Msg& m) {
                           out.insert(m.from);
                           out.insert(m.to);
                       },
                       [&](const gw::Act& a) { out.insert(a.at); },
                       [&](const gw::Seq& s) {
                           walk(s.first);
                           walk(s.second);
                       },
                       [&](const gw::If& i) {
                           out.insert(i.owner);
                           walk(i.then_branch);
                           walk(i.else_branch);
                       },
                       [&](const gw::While& w) {
                           out.insert(w.owner);
                           walk(w.body);
                           walk(w.exit);
                       },
                   },
                   q.node().v);
    };
    walk(p);
    return out;
}

namespace {

GlobalWorkflow tag_at(const GlobalWorkflow& p, const std::string& path) {
    auto child = [&](int i) { return path + "." + std::to_string(i); };
    return std::visit(
        overloaded{
            [&](const gw::Seq& s) {
                return gw::seq(tag_at(s.first, child(0)), tag_at(s.second, child(1)), p.span());
            },
            [&](const gw::If& i) {
                return gw::if_(i.cond, i.owner, tag_at(i.then_branch, child(0)),
                               tag_at(i.else_branch, child(1)), ControlTag(path), p.span());
            },
            [&](const gw::While& w) {
                return gw::while_(w.cond, w.owner, tag_at(w.body, child(0)),
                                  tag_at(w.exit, child(1)), ControlTag(path), p.span());
            },
            [&](const auto&) { return p; },
        },
        p.node().v);
}

} // namespace

GlobalWorkflow assign_control_tags(const GlobalWorkflow& p) { return tag_at(p, "0"); }

WorkflowDecl assign_control_tags(WorkflowDecl decl) {
    decl.body = assign_control_tags(decl.body);
    return decl;
}

std::size_t workflow_size(const GlobalWorkflow& p) {
    return std::visit(overloaded{
                          [](const gw::Seq& s) {
                              return 1 + workflow_size(s.first) + workflow_size(s.second);
                          },
                          [](const gw::If& i) {
                              return 1 + workflow_size(i.then_branch) +
                                     workflow_size(i.else_branch);
                          },
                          [](const gw::While& w) {
                              return 1 + workflow_size(w.body) + workflow_size(w.exit);
                          },
                          [](const auto&) -> std::size_t { return 1; },
                      },
                      p.node().v);
}

namespace {

void collect_tags(const GlobalWorkflow& p, std::vector<ControlTag>& out) {
    std::visit(overloaded{
                   [&](const gw::Seq& s) {
                       collect_tags(s.first, out);
                       collect_tags(s.second, out);
                   },
                   [&](const gw::If& i) {
                       out.push_back(i.tag);
                       collect_tags(i.then_branch, out);
                       collect_tags(i.else_branch, out);
                   },
                   [&](const gw::While& w) {
                       out.push_back(w.tag);
                       collect_tags(w.body, out);
                       collect_tags(w.exit, out);
                   },
                   [](const auto&) {},
               },
               p.node().v);
}

} // namespace

std::vector<ControlTag> control_tags(const GlobalWorkflow& p) {
    std::vector<ControlTag> out;
    collect_tags(p, out);
    return out;
}

std::size_t control_construct_count(const GlobalWorkflow& p) { return control_tags(p).size(); }

std::set<Lifeline> WorkflowDecl::lifelines() const {
    auto out = participation_set(body);
    for (const auto& p : params) out.insert(p.owner);
    for (const auto& v : vars) out.insert(v.owner);
    out.insert(return_at);
    return out;
}

} // namespace mscflow
