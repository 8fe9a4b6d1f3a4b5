#pragma once

#include <set>
#include <string>
#include <vector>

#include "mscflow/local_program.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

/// `__ctrl_<tag>` with dots replaced by underscores.
std::string control_var_name(const ControlTag& tag);

/// Lifelines that must observe a decision: participants of either branch
/// other than the owner, in ⊏ (name) order.
std::vector<Lifeline> recipient_set(const Lifeline& owner, const GlobalWorkflow& a,
                                    const GlobalWorkflow& b);

/// Throws Errc::contract on an untagged control construct.
LocalProgram project(const GlobalWorkflow& p, const Lifeline& a);

/// Projects onto every lifeline of `lifelines` (participation set if empty).
DistributedProgram project_all(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines = {});
DistributedProgram project_all(const WorkflowDecl& decl);

enum class DecisionKind { if_, while_ };

/// The complete decision MSC: the owner's choice letter followed by its
/// ⊏-ordered control sends, and one matching control receive per recipient.
/// Throws Errc::contract when the owner is among the recipients.
MscTuple decision_block(const Lifeline& owner, bool value, const ControlTag& tag,
                        const std::set<Lifeline>& recipients, DecisionKind kind,
                        const Condition& cond = {}, const std::set<Lifeline>& universe = {});

} // namespace mscflow
