#pragma once

#include <map>
#include <string>
#include <vector>

#include "mscflow/diagnostics.hpp"
#include "mscflow/value.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

enum class ActionKind { llm, pure, planner };

std::string_view to_string(ActionKind k) noexcept;

struct TypedName {
    std::string name;
    ValueType type = ValueType::string;
    friend bool operator==(const TypedName&, const TypedName&) = default;
};

/// Declared signature and backend metadata of an action.
struct ActionDecl {
    std::string name;
    ActionKind kind = ActionKind::pure;
    std::vector<TypedName> inputs;
    std::vector<TypedName> outputs;

    // llm
    std::string system_template;
    std::string user_template;
    std::string parse_mode;

    // planner
    std::string description;
    std::vector<Lifeline> lifelines;
    std::vector<std::string> allow;
    std::string instructions;
    std::vector<std::string> vocabulary;

    SourceSpan span;

    std::string signature() const;

    friend bool operator==(const ActionDecl& a, const ActionDecl& b) {
        return a.name == b.name && a.kind == b.kind && a.inputs == b.inputs &&
               a.outputs == b.outputs && a.system_template == b.system_template &&
               a.user_template == b.user_template && a.parse_mode == b.parse_mode &&
               a.description == b.description && a.lifelines == b.lifelines &&
               a.allow == b.allow && a.instructions == b.instructions &&
               a.vocabulary == b.vocabulary;
    }
};

using ActionRegistry = std::map<std::string, ActionDecl>;

ActionRegistry make_registry(const std::vector<ActionDecl>& decls);

} // namespace mscflow
