#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mscflow/local_program.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/runtime.hpp"
#include "mscflow/semantics.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

enum class Verdict { pass, fail, resource_exceeded };
std::string_view to_string(Verdict v) noexcept;

struct VerificationReport {
    std::string check;
    Verdict verdict = Verdict::pass;
    /// Unroll bound the verdict holds for; empty for bound-free checks.
    std::optional<std::size_t> bound;
    std::string detail;
    std::optional<MscTuple> witness;
    std::optional<std::pair<LocalWord, LocalWord>> word_witness;

    bool passed() const { return verdict == Verdict::pass; }
    nlohmann::json to_json() const;
};

/// A workflow together with the distributed program claimed to implement it.
/// `program` is normally project_all(workflow); tests substitute mutants.
struct VerifyTarget {
    GlobalWorkflow workflow; // tagged
    std::set<Lifeline> lifelines;
    DistributedProgram program;

    static VerifyTarget of(const WorkflowDecl& decl);
    static VerifyTarget of(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines = {});
};

/// erase(distributed semantics) = global semantics at the bound.
VerificationReport check_theorem_correctness(const VerifyTarget& t, const Bound& bound);
VerificationReport check_theorem_correctness(const GlobalWorkflow& p, const Bound& bound);

/// Every prefix-semantics member extends to a complete-semantics member.
VerificationReport check_deadlock_freedom(const DistributedProgram& d, const Bound& bound);
VerificationReport check_deadlock_freedom(const GlobalWorkflow& p, const Bound& bound);

/// A complete member extending `m`, if any.
std::optional<MscTuple> find_extension(const MscTuple& m, const MscSet& complete);

VerificationReport check_prefix_freeness(const Lifeline& at, const LocalProgram& s,
                                         const Bound& bound);
VerificationReport check_erasure_lemma(const MscTuple& m);
VerificationReport check_concat_lemmas(const MscTuple& m1, const MscTuple& m2);
/// Prefixes of s1;s2 split at a boundary where the s1 part is complete
/// whenever the s2 part is non-empty.
VerificationReport check_factorization(const Lifeline& at, const LocalProgram& s1,
                                       const LocalProgram& s2, const Bound& bound);

/// Decision skeleton of the program: every owner branch opens with
/// ⊏-ordered control sends to exactly the recipient set, every recipient
/// holds one matching receive-guarded construct, and tags are not shared
/// between constructs.
VerificationReport check_decision_structure(const VerifyTarget& t);

/// Total projected node count ≤ n|P| + 2(n−1)|P|.
VerificationReport check_size_bound(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines);

/// All checks on one target: theorem, deadlock freedom, prefix-freeness per
/// lifeline, decision structure, size bound.
std::vector<VerificationReport> verify_all(const VerifyTarget& t, const Bound& bound);

/// Replaces concrete values by the payload atoms of the executed statements.
MscTuple symbolic_trace_of(const std::vector<TraceEvent>& log,
                           const std::set<Lifeline>& universe);

enum class Mutation {
    drop_broadcast,
    reorder_broadcasts,
    reuse_tag,
    swap_recipient_branches,
    omit_recipient,
};
std::string_view to_string(Mutation m) noexcept;
inline constexpr Mutation kAllMutations[] = {
    Mutation::drop_broadcast, Mutation::reorder_broadcasts, Mutation::reuse_tag,
    Mutation::swap_recipient_branches, Mutation::omit_recipient};

/// Projection with one seeded defect at the first applicable construct, or
/// nullopt when the workflow offers no site for it.
std::optional<DistributedProgram> mutate_projection(const GlobalWorkflow& p,
                                                    const std::set<Lifeline>& lifelines,
                                                    Mutation m);

} // namespace mscflow
