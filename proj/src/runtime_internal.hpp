#pragma once

#include <optional>

#include "mscflow/runtime.hpp"

namespace mscflow::detail {

void normalize(AgentState& a);
std::optional<EnabledStep> head_step(const Configuration& c, const Lifeline& at,
                                     const AgentState& a);
const Value& read(const AgentState& a, const Lifeline& at, const std::string& name);
std::vector<Value> eval(const AgentState& a, const Lifeline& at, const Payload& p);
void record(Configuration& c, Letter letter, std::vector<Value> values,
            std::vector<Value> inputs = {});
std::vector<Value> run_action(AgentState& a, const Lifeline& at, const lp::Act& x,
                              const std::vector<Value>& inputs, const StepContext& ctx);
RunResult finish_run(Configuration c, const WorkflowDecl& decl);

} // namespace mscflow::detail
