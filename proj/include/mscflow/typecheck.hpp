#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mscflow/action_decl.hpp"
#include "mscflow/diagnostics.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

/// Types of variables, scoped per lifeline.
using VarTypes = std::map<std::pair<Lifeline, std::string>, ValueType>;

/// Variables definitely assigned at a program point, per lifeline.
struct AvailabilityEnv {
    std::map<Lifeline, std::map<std::string, ValueType>> vars;

    bool available(const Lifeline& at, const std::string& name) const;
    std::optional<ValueType> type_of(const Lifeline& at, const std::string& name) const;
    void bind(const Lifeline& at, const std::string& name, ValueType t);

    /// Branch join: keeps variables available in both environments.
    static AvailabilityEnv intersect(const AvailabilityEnv& a, const AvailabilityEnv& b);
};

struct PayloadMismatch {
    enum class Kind { length, constant, type };
    Kind kind;
    std::size_t index = 0; // 1-based; 0 for a length mismatch
    std::string message;
};

/// Static payload matching. `send_type`/`recv_type` resolve variable types;
/// an unresolved receiver variable accepts any sender component.
std::optional<PayloadMismatch> check_payload_match(
    const Payload& send, const Payload& recv,
    const std::function<std::optional<ValueType>(const std::string&)>& send_type,
    const std::function<std::optional<ValueType>(const std::string&)>& recv_type);

struct TypeCheckResult {
    std::vector<Diagnostic> diagnostics;
    VarTypes types;
    bool ok() const { return !has_errors(diagnostics); }
};

TypeCheckResult typecheck(const WorkflowDecl& decl, const ActionRegistry& actions);

std::vector<Diagnostic> check_well_typed(const WorkflowDecl& decl,
                                         const std::vector<ActionDecl>& actions);

} // namespace mscflow
