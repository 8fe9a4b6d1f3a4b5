#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>

#include <json.hpp>

#include "mscflow/condition.hpp"
#include "mscflow/value.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

struct LNode;

/// Per-lifeline program. The lifeline itself is not stored; it is the key
/// under which the program sits in a DistributedProgram.
class LocalProgram {
public:
    LocalProgram(); // epsilon
    explicit LocalProgram(std::shared_ptr<const LNode> n) : node_(std::move(n)) {}

    const LNode& node() const noexcept { return *node_; }
    const LNode* ptr() const noexcept { return node_.get(); }
    template <class T>
    const T* as() const;
    bool is_epsilon() const;

    friend bool operator==(const LocalProgram& a, const LocalProgram& b);

private:
    std::shared_ptr<const LNode> node_;
};

namespace lp {

struct Epsilon {
    friend bool operator==(const Epsilon&, const Epsilon&) = default;
};
struct Send {
    Payload payload;
    Lifeline to;
    std::optional<ControlTag> control;
    friend bool operator==(const Send&, const Send&) = default;
};
struct Recv {
    Payload payload;
    Lifeline from;
    std::optional<ControlTag> control;
    friend bool operator==(const Recv&, const Recv&) = default;
};
struct Act {
    Payload outputs;
    std::string action;
    Payload inputs;
    friend bool operator==(const Act&, const Act&) = default;
};
struct Seq {
    LocalProgram first;
    LocalProgram second;
    friend bool operator==(const Seq&, const Seq&) = default;
};
struct IfOwned {
    Condition cond;
    LocalProgram then_branch;
    LocalProgram else_branch;
    ControlTag tag;
    friend bool operator==(const IfOwned&, const IfOwned&) = default;
};
/// `if A(z, tag) <- from then .. else ..`
struct IfRecv {
    Lifeline from;
    ControlTag tag;
    std::string bound_var;
    LocalProgram then_branch;
    LocalProgram else_branch;
    friend bool operator==(const IfRecv&, const IfRecv&) = default;
};
struct WhileOwned {
    Condition cond;
    LocalProgram body;
    LocalProgram exit;
    ControlTag tag;
    friend bool operator==(const WhileOwned&, const WhileOwned&) = default;
};
struct WhileRecv {
    Lifeline from;
    ControlTag tag;
    std::string bound_var;
    LocalProgram body;
    LocalProgram exit;
    friend bool operator==(const WhileRecv&, const WhileRecv&) = default;
};

LocalProgram epsilon();
LocalProgram send(Payload payload, Lifeline to, std::optional<ControlTag> control = std::nullopt);
LocalProgram recv(Payload payload, Lifeline from, std::optional<ControlTag> control = std::nullopt);
LocalProgram act(Payload outputs, std::string action, Payload inputs);
LocalProgram seq(LocalProgram first, LocalProgram second);
/// Right-nested; empty list gives epsilon.
LocalProgram seq(std::vector<LocalProgram> items);
LocalProgram if_owned(Condition cond, LocalProgram then_branch, LocalProgram else_branch,
                      ControlTag tag = {});
LocalProgram if_recv(Lifeline from, ControlTag tag, std::string bound_var,
                     LocalProgram then_branch, LocalProgram else_branch);
LocalProgram while_owned(Condition cond, LocalProgram body, LocalProgram exit,
                         ControlTag tag = {});
LocalProgram while_recv(Lifeline from, ControlTag tag, std::string bound_var, LocalProgram body,
                        LocalProgram exit);

} // namespace lp

struct LNode {
    std::variant<lp::Epsilon, lp::Send, lp::Recv, lp::Act, lp::Seq, lp::IfOwned, lp::IfRecv,
                 lp::WhileOwned, lp::WhileRecv>
        v;
};

template <class T>
const T* LocalProgram::as() const {
    return std::get_if<T>(&node_->v);
}

using DistributedProgram = std::map<Lifeline, LocalProgram>;

/// Number of nodes, epsilon and sequence nodes included.
std::size_t node_count(const LocalProgram& s);
std::size_t node_count(const DistributedProgram& d);

/// Text form mirroring the workflow DSL with send/recv statements.
std::string to_text(const LocalProgram& s, int indent = 0);
std::string to_text(const DistributedProgram& d);

nlohmann::json to_json(const LocalProgram& s);
LocalProgram local_program_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DistributedProgram& d);
DistributedProgram distributed_program_from_json(const nlohmann::json& j);

} // namespace mscflow
