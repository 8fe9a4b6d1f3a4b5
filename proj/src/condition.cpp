#include "mscflow/condition.hpp"

#include "mscflow/error.hpp"

namespace mscflow {

struct Condition::Node {
    Op op = Op::literal;
    Value literal;
    std::string var;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
    SourceSpan span;
};

namespace {

// Binding strength used by the printer; higher binds tighter.
int precedence(Condition::Op op) {
    switch (op) {
    case Condition::Op::disj: return 1;
    case Condition::Op::conj: return 2;
    case Condition::Op::negate: return 3;
    case Condition::Op::eq:
    case Condition::Op::lt:
    case Condition::Op::le: return 4;
    default: return 5;
    }
}

const char* op_spelling(Condition::Op op) {
    switch (op) {
    case Condition::Op::disj: return "or";
    case Condition::Op::conj: return "and";
    case Condition::Op::eq: return "==";
    case Condition::Op::lt: return "<";
    case Condition::Op::le: return "<=";
    default: return "?";
    }
}

std::string wrap(const Condition& c, int min_prec) {
    auto s = c.to_source();
    return precedence(c.op()) < min_prec ? "(" + s + ")" : s;
}

} // namespace

Condition::Condition()
    : node_(std::make_shared<Node>(Node{Op::literal, Value::boolean(true), {}, {}, {}, {}})) {}

Condition Condition::literal(Value v, SourceSpan span) {
    return Condition(std::make_shared<Node>(Node{Op::literal, std::move(v), {}, {}, {}, span}));
}

Condition Condition::var(std::string name, SourceSpan span) {
    return Condition(std::make_shared<Node>(
        Node{Op::var, Value::boolean(false), std::move(name), {}, {}, span}));
}

Condition Condition::negate(Condition operand, SourceSpan span) {
    return Condition(std::make_shared<Node>(
        Node{Op::negate, Value::boolean(false), {}, std::move(operand.node_), {}, span}));
}

Condition Condition::binary(Op op, Condition lhs, Condition rhs, SourceSpan span) {
    if (op == Op::literal || op == Op::var || op == Op::negate)
        throw Error(Errc::contract, "Condition::binary called with a non-binary operator");
    return Condition(std::make_shared<Node>(Node{op, Value::boolean(false), {},
                                                 std::move(lhs.node_), std::move(rhs.node_),
                                                 span}));
}

Condition::Op Condition::op() const noexcept { return node_->op; }
const Value& Condition::literal_value() const { return node_->literal; }
const std::string& Condition::var_name() const { return node_->var; }
Condition Condition::lhs() const { return Condition(node_->lhs); }
Condition Condition::rhs() const { return Condition(node_->rhs); }
const SourceSpan& Condition::span() const noexcept { return node_->span; }

std::string Condition::to_source() const {
    switch (op()) {
    case Op::literal: return literal_value().to_source();
    case Op::var: return var_name();
    case Op::negate: return "not " + wrap(operand(), precedence(Op::negate));
    case Op::conj:
    case Op::disj: {
        int p = precedence(op());
        // Left-associative: the right operand needs parentheses at equal strength.
        return wrap(lhs(), p) + " " + op_spelling(op()) + " " + wrap(rhs(), p + 1);
    }
    case Op::eq:
    case Op::lt:
    case Op::le:
        // Comparisons do not chain; both operands must be primaries.
        return wrap(lhs(), 5) + " " + op_spelling(op()) + " " + wrap(rhs(), 5);
    }
    return {};
}

void Condition::collect_vars(std::set<std::string>& out) const {
    if (op() == Op::var) {
        out.insert(var_name());
        return;
    }
    if (node_->lhs) lhs().collect_vars(out);
    if (node_->rhs) rhs().collect_vars(out);
}

Value Condition::evaluate(const std::function<Value(const std::string&)>& lookup) const {
    switch (op()) {
    case Op::literal: return literal_value();
    case Op::var: return lookup(var_name());
    case Op::negate: return Value::boolean(!operand().evaluate(lookup).as_boolean());
    case Op::conj:
        return Value::boolean(lhs().evaluate(lookup).as_boolean() &&
                              rhs().evaluate(lookup).as_boolean());
    case Op::disj:
        return Value::boolean(lhs().evaluate(lookup).as_boolean() ||
                              rhs().evaluate(lookup).as_boolean());
    case Op::eq: return Value::boolean(lhs().evaluate(lookup) == rhs().evaluate(lookup));
    case Op::lt:
    case Op::le: {
        auto a = lhs().evaluate(lookup);
        auto b = rhs().evaluate(lookup);
        if (a.type() != b.type())
            throw Error(Errc::type, "comparison between values of different types");
        bool less = a < b;
        return Value::boolean(op() == Op::lt ? less : (less || a == b));
    }
    }
    return Value::boolean(false);
}

bool operator==(const Condition& a, const Condition& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
    case Condition::Op::literal: return a.literal_value() == b.literal_value();
    case Condition::Op::var: return a.var_name() == b.var_name();
    case Condition::Op::negate: return a.operand() == b.operand();
    default: return a.lhs() == b.lhs() && a.rhs() == b.rhs();
    }
}

} // namespace mscflow
