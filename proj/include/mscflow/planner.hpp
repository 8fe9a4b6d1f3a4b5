#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mscflow/action_decl.hpp"
#include "mscflow/actions.hpp"
#include "mscflow/diagnostics.hpp"
#include "mscflow/error.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/runtime.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

/// Generated workflow rejected; carries the diagnostics.
class ValidationError : public Error {
public:
    ValidationError(const std::string& what, std::vector<Diagnostic> diags)
        : Error(Errc::validation, what), diags_(std::move(diags)) {}
    const std::vector<Diagnostic>& diagnostics() const noexcept { return diags_; }

private:
    std::vector<Diagnostic> diags_;
};

/// Raw prompt asset with `{{...}}` slots.
std::string planner_prompt_template();

/// Name plus the signatures of the vocabulary actions, one worker per line.
std::string worker_summary(const ActionDecl& planner, const ActionRegistry& registry);

std::string compose_planner_prompt(const ActionDecl& planner, const std::vector<Value>& inputs,
                                   const ActionRegistry& registry);

struct GeneratedWorkflow {
    WorkflowDecl workflow; // tagged
    std::vector<ActionDecl> new_actions;
    ActionRegistry registry; // caller registry plus new actions
};

/// Parses and checks generated text against the planner's constraints and
/// the ordinary type checker. Returns the diagnostics; `out` is filled when
/// there are none.
std::vector<Diagnostic> validate_generated(const ActionDecl& planner, const std::string& source,
                                           const Lifeline& caller, const ActionRegistry& registry,
                                           std::optional<GeneratedWorkflow>* out = nullptr,
                                           const PureRegistry& pure = PureRegistry::builtins());

struct PlanOptions {
    Lifeline caller;
    std::size_t invocation = 0;
    int depth = 0;
    int max_depth = 2;
};

struct PlanResult {
    Value result;
    std::string source;
    WorkflowDecl workflow;
    MscTuple trace;
    std::vector<TraceEvent> log;
};

/// Generates, validates, projects and runs a sub-workflow in a fresh
/// configuration. Errors: Errc::planner_depth, ValidationError, generation
/// and run failures.
PlanResult plan_and_run(const ActionDecl& planner, const std::vector<Value>& inputs,
                        ActionBackend& backend, const ActionRegistry& registry,
                        const PlanOptions& options = {});

} // namespace mscflow
