#pragma once

#include <compare>
#include <cstddef>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "mscflow/condition.hpp"
#include "mscflow/diagnostics.hpp"
#include "mscflow/value.hpp"

namespace mscflow {

/// A named participant. Ordering is lexicographic on the name and is the
/// total order used to sequence control broadcasts.
class Lifeline {
public:
    Lifeline() = default;
    explicit Lifeline(std::string name) : name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

    friend auto operator<=>(const Lifeline&, const Lifeline&) = default;
    friend bool operator==(const Lifeline&, const Lifeline&) = default;

private:
    std::string name_;
};

/// Identifies one control construct: the dotted child-index path from the
/// workflow root. An empty tag means "not yet assigned".
class ControlTag {
public:
    ControlTag() = default;
    explicit ControlTag(std::string path) : path_(std::move(path)) {}

    const std::string& str() const noexcept { return path_; }
    bool empty() const noexcept { return path_.empty(); }

    friend auto operator<=>(const ControlTag&, const ControlTag&) = default;
    friend bool operator==(const ControlTag&, const ControlTag&) = default;

private:
    std::string path_;
};

/// Reserved prefix for projection-introduced variables; rejected by the parser.
inline constexpr std::string_view kReservedPrefix = "__ctrl";

struct GNode;

/// Immutable global workflow tree with cheap copies.
class GlobalWorkflow {
public:
    GlobalWorkflow(); // epsilon
    explicit GlobalWorkflow(std::shared_ptr<const GNode> n) : node_(std::move(n)) {}

    const GNode& node() const noexcept { return *node_; }
    const SourceSpan& span() const noexcept;

    template <class T>
    const T* as() const;

    bool is_epsilon() const;

    friend bool operator==(const GlobalWorkflow& a, const GlobalWorkflow& b);

private:
    std::shared_ptr<const GNode> node_;
};

namespace gw {

struct Epsilon {
    friend bool operator==(const Epsilon&, const Epsilon&) = default;
};

struct Msg {
    Lifeline from;
    Lifeline to;
    Payload send;
    Payload recv;
    friend bool operator==(const Msg&, const Msg&) = default;
};

struct Act {
    Lifeline at;
    Payload outputs;
    std::string action;
    Payload inputs;
    friend bool operator==(const Act&, const Act&) = default;
};

struct Seq {
    GlobalWorkflow first;
    GlobalWorkflow second;
    friend bool operator==(const Seq&, const Seq&) = default;
};

struct If {
    Condition cond;
    Lifeline owner;
    GlobalWorkflow then_branch;
    GlobalWorkflow else_branch;
    ControlTag tag;
    friend bool operator==(const If&, const If&) = default;
};

struct While {
    Condition cond;
    Lifeline owner;
    GlobalWorkflow body;
    GlobalWorkflow exit;
    ControlTag tag;
    friend bool operator==(const While&, const While&) = default;
};

GlobalWorkflow epsilon(SourceSpan span = {});
GlobalWorkflow msg(Lifeline from, Payload send, Lifeline to, Payload recv, SourceSpan span = {});
GlobalWorkflow act(Lifeline at, Payload outputs, std::string action, Payload inputs,
                   SourceSpan span = {});
GlobalWorkflow seq(GlobalWorkflow first, GlobalWorkflow second, SourceSpan span = {});
/// Right-nested sequence; empty list gives epsilon, singleton gives itself.
GlobalWorkflow seq(std::vector<GlobalWorkflow> items);
GlobalWorkflow if_(Condition cond, Lifeline owner, GlobalWorkflow then_branch,
                   GlobalWorkflow else_branch, ControlTag tag = {}, SourceSpan span = {});
GlobalWorkflow while_(Condition cond, Lifeline owner, GlobalWorkflow body, GlobalWorkflow exit,
                      ControlTag tag = {}, SourceSpan span = {});

} // namespace gw

struct GNode {
    std::variant<gw::Epsilon, gw::Msg, gw::Act, gw::Seq, gw::If, gw::While> v;
    SourceSpan span;
};

template <class T>
const T* GlobalWorkflow::as() const {
    return std::get_if<T>(&node_->v);
}

struct VarDecl {
    std::string name;
    ValueType type = ValueType::string;
    Lifeline owner;
    std::optional<Value> initial; // absent for parameters
    SourceSpan span;

    friend bool operator==(const VarDecl& a, const VarDecl& b) {
        return a.name == b.name && a.type == b.type && a.owner == b.owner &&
               a.initial == b.initial;
    }
};

struct WorkflowDecl {
    std::string name;
    std::vector<VarDecl> params;
    std::vector<VarDecl> vars;
    std::optional<ValueType> return_type;
    GlobalWorkflow body;
    std::string return_var;
    Lifeline return_at;
    SourceSpan span;

    /// Every lifeline mentioned by parameters, declarations, the body, or
    /// the return declaration, in total order.
    std::set<Lifeline> lifelines() const;

    friend bool operator==(const WorkflowDecl& a, const WorkflowDecl& b) {
        return a.name == b.name && a.params == b.params && a.vars == b.vars &&
               a.return_type == b.return_type && a.body == b.body &&
               a.return_var == b.return_var && a.return_at == b.return_at;
    }
};

std::set<Lifeline> participation_set(const GlobalWorkflow& p);

/// Re-tags every if/while with its child-index path ("0" for the root;
/// children of a node at path `p` live at `p.0`, `p.1`).
GlobalWorkflow assign_control_tags(const GlobalWorkflow& p);
WorkflowDecl assign_control_tags(WorkflowDecl decl);

/// Number of grammar nodes, epsilon included.
std::size_t workflow_size(const GlobalWorkflow& p);

/// Number of if/while nodes.
std::size_t control_construct_count(const GlobalWorkflow& p);

/// Tags of all control constructs in pre-order.
std::vector<ControlTag> control_tags(const GlobalWorkflow& p);

} // namespace mscflow
