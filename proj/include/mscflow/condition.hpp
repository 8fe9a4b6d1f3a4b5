#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>

#include "mscflow/diagnostics.hpp"
#include "mscflow/value.hpp"

namespace mscflow {

/// Guard expression owned by a single lifeline: literals, variable
/// references, `not`/`and`/`or`, and `==`, `<`, `<=` comparisons.
class Condition {
public:
    enum class Op { literal, var, negate, conj, disj, eq, lt, le };

    /// Defaults to the literal `true`.
    Condition();

    static Condition literal(Value v, SourceSpan span = {});
    static Condition var(std::string name, SourceSpan span = {});
    static Condition negate(Condition operand, SourceSpan span = {});
    static Condition binary(Op op, Condition lhs, Condition rhs, SourceSpan span = {});

    Op op() const noexcept;
    const Value& literal_value() const;
    const std::string& var_name() const;
    Condition operand() const { return lhs(); }
    Condition lhs() const;
    Condition rhs() const;
    const SourceSpan& span() const noexcept;

    /// Source form with the minimal parentheses needed to re-parse to the
    /// same tree.
    std::string to_source() const;

    void collect_vars(std::set<std::string>& out) const;

    Value evaluate(const std::function<Value(const std::string&)>& lookup) const;

    /// Structural equality; spans are ignored.
    friend bool operator==(const Condition& a, const Condition& b);

private:
    struct Node;
    explicit Condition(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

} // namespace mscflow
