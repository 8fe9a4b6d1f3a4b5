#pragma once

#include <cstddef>
#include <set>

#include "mscflow/local_program.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

inline constexpr std::size_t kDefaultResourceCap = 100000;

/// Loop truncation (maximum ⊤-iterations per while) and the set-size cap.
/// Exceeding the cap throws Errc::resource_exceeded.
struct Bound {
    std::size_t unroll = 1;
    std::size_t cap = kDefaultResourceCap;
};

/// Table 1 with while unions truncated at `bound.unroll`. Tuples range over
/// `universe` (the participation set when empty).
MscSet global_semantics(const GlobalWorkflow& p, const Bound& bound,
                        const std::set<Lifeline>& universe = {});

WordSet local_traces(const Lifeline& at, const LocalProgram& s, const Bound& bound);
WordSet local_prefixes(const Lifeline& at, const LocalProgram& s, const Bound& bound);

/// Tuples of local traces forming complete MSCs.
MscSet distributed_semantics(const DistributedProgram& d, const Bound& bound);
/// Tuples of local prefixes forming MSCs.
MscSet distributed_prefix_semantics(const DistributedProgram& d, const Bound& bound);

} // namespace mscflow
