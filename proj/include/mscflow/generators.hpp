#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "mscflow/action_decl.hpp"
#include "mscflow/actions.hpp"
#include "mscflow/local_program.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/semantics.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

using Rng = std::mt19937_64;

struct GeneratorConfig {
    std::size_t lifelines = 3;
    /// Rough statement budget.
    std::size_t budget = 8;
    /// Maximum nesting of if/while.
    std::size_t depth = 2;
    bool use_if = true;
    bool use_while = true;
    /// Runtime iterations of each generated loop.
    std::int64_t loop_limit = 2;
};

struct RandomCase {
    WorkflowDecl decl; // tagged
    std::vector<ActionDecl> actions;
};

/// Well-typed by construction: every lifeline declares `s: str`, `n: int`,
/// `b: bool` with initialisers, loops count a private counter up to
/// `loop_limit`, and actions are the g_* functions.
RandomCase random_workflow(Rng& rng, const GeneratorConfig& cfg = {});

/// Declarations of g_inc, g_not, g_cat, g_len, g_pair.
std::vector<ActionDecl> generator_actions();
/// Builtins plus the g_* functions.
PureRegistry generator_pure_registry();

/// Arbitrary local program over send/recv/act and all control forms.
LocalProgram random_local_program(Rng& rng, const std::vector<Lifeline>& peers,
                                  std::size_t budget = 6, std::size_t depth = 2);

/// One local prefix per lifeline chosen independently; usually not an MSC.
MscTuple random_prefix_tuple(Rng& rng, const DistributedProgram& d, const Bound& bound);

/// Uniform pick; the set must be non-empty.
const MscTuple& pick(Rng& rng, const MscSet& s);

} // namespace mscflow
