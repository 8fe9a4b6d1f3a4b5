#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mscflow/action_decl.hpp"
#include "mscflow/condition.hpp"
#include "mscflow/diagnostics.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

template <class T>
struct ParseResult {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return value.has_value(); }
};

/// A source file may mix workflow and action declarations.
struct SourceUnit {
    std::vector<WorkflowDecl> workflows;
    std::vector<ActionDecl> actions;
};

ParseResult<SourceUnit> parse_unit(std::string_view text);

/// Exactly one workflow and nothing else.
ParseResult<WorkflowDecl> parse_workflow(std::string_view text);

/// Action declarations only; empty input yields an empty list.
ParseResult<std::vector<ActionDecl>> parse_actions(std::string_view text);

ParseResult<Condition> parse_condition(std::string_view text);

std::string pretty_print(const WorkflowDecl& decl);
std::string pretty_print(const ActionDecl& decl);
std::string pretty_print(const GlobalWorkflow& body, int indent = 0);

} // namespace mscflow
