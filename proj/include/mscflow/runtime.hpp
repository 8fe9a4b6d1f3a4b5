#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mscflow/action_decl.hpp"
#include "mscflow/actions.hpp"
#include "mscflow/local_program.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/value.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

struct Message {
    std::vector<Value> values;
    std::optional<ControlTag> control;
    friend bool operator==(const Message&, const Message&) = default;
};

struct AgentState {
    /// Continuation; the back is the next statement. Kept normalized: the
    /// top is never epsilon or a sequence.
    std::vector<LocalProgram> stack;
    std::map<std::string, Value> store;
    /// Invocations so far per action name.
    std::map<std::string, std::size_t> invocations;

    bool done() const { return stack.empty(); }
};

/// One executed letter. `values` are the concrete payload (sends and
/// receives), outputs (actions) or decision (choices and control receives);
/// `inputs` are action input values.
struct TraceEvent {
    std::size_t seq = 0;
    Letter letter;
    std::vector<Value> values;
    std::vector<Value> inputs;

    /// The letter with every payload atom replaced by its concrete value.
    Letter concrete() const;
    nlohmann::json to_json() const;
};

/// Newline-delimited JSON, one event per line.
std::string log_to_ndjson(const std::vector<TraceEvent>& log);

using Channel = std::pair<Lifeline, Lifeline>; // (from, to)

struct Configuration {
    std::map<Lifeline, AgentState> agents;
    std::map<Channel, std::deque<Message>> channels;
    std::vector<TraceEvent> log;
    std::size_t next_seq = 1;

    bool final() const;
};

using Inputs = std::map<std::string, Value>;

/// Inputs are keyed by parameter name, or `Lifeline.name` to disambiguate.
/// Errc::input on a missing or ill-typed input, or an unknown key.
Configuration initial_configuration(const DistributedProgram& d, const WorkflowDecl& decl,
                                    const Inputs& inputs);

enum class StepKind { send, recv, action, choice, control_recv };
std::string_view to_string(StepKind k) noexcept;

struct EnabledStep {
    Lifeline lifeline;
    StepKind kind;
    std::string describe;
};

/// A lifeline is enabled iff its head can fire. Sends and actions always can;
/// receives need a matching head on their own channel.
std::vector<EnabledStep> enabled_steps(const Configuration& c);

/// Backend, declarations and planner nesting used by steps.
struct StepContext {
    const ActionRegistry* actions = nullptr;
    ActionBackend* backend = nullptr;
    int planner_depth = 0;
    int max_planner_depth = 2;
};

/// Fires the head of `at` in place. Errc::contract if `at` is not enabled.
void apply_step(Configuration& c, const Lifeline& at, const StepContext& ctx);
Configuration step(Configuration c, const Lifeline& at, const StepContext& ctx);

struct Scheduler {
    enum class Kind { round_robin, random, script };
    Kind kind = Kind::round_robin;
    std::uint64_t seed = 0;
    /// For `script`: lifelines to fire in order; round robin afterwards.
    std::vector<Lifeline> order;

    static Scheduler round_robin() { return {}; }
    static Scheduler random(std::uint64_t seed) { return {Kind::random, seed, {}}; }
    static Scheduler scripted(std::vector<Lifeline> order) {
        return {Kind::script, 0, std::move(order)};
    }
};

struct RunOptions {
    Scheduler scheduler;
    std::size_t max_steps = 1000000;
    int planner_depth = 0;
    int max_planner_depth = 2;
};

struct RunResult {
    Value result;
    /// Concrete per-lifeline trace.
    MscTuple trace;
    std::vector<TraceEvent> log;
    Configuration final_state;
};

/// Runs to termination. Errc::stuck if no lifeline is enabled before all are
/// done; afterwards asserts the trace is a complete MSC (Errc::invariant).
RunResult run(const DistributedProgram& d, const WorkflowDecl& decl, const Inputs& inputs,
              const ActionRegistry& actions, ActionBackend& backend,
              const RunOptions& options = {});

/// Concrete trace over the lifelines of `universe` built from a log.
MscTuple trace_of(const std::vector<TraceEvent>& log, const std::set<Lifeline>& universe);

/// One thread per lifeline over blocking channels. A global deadlock
/// (every unfinished lifeline waiting on an empty or mismatched channel)
/// raises Errc::stuck.
RunResult run_concurrent(const DistributedProgram& d, const WorkflowDecl& decl,
                         const Inputs& inputs, const ActionRegistry& actions,
                         ActionBackend& backend, const RunOptions& options = {});

struct ExploreOptions {
    std::size_t depth = 10000;
    /// Called on every newly visited configuration.
    std::function<void(const Configuration&)> observe;
};

struct ExploreResult {
    enum class Verdict { ok, stuck, bounded };
    Verdict verdict = Verdict::ok;
    std::size_t states = 0;
    std::size_t terminal_states = 0;
    /// Configurations cut off at the depth bound.
    std::size_t frontier = 0;
    /// Schedule reaching the stuck configuration.
    std::vector<Lifeline> witness_schedule;
    std::optional<Configuration> witness;
    /// Concrete traces of distinct terminal configurations.
    MscSet terminal_traces;
};

std::string_view to_string(ExploreResult::Verdict v) noexcept;

/// Exhaustive DFS over scheduler choices with state memoization.
/// Errc::nondeterministic_backend unless backend.deterministic().
ExploreResult explore(const DistributedProgram& d, const WorkflowDecl& decl,
                      const Inputs& inputs, const ActionRegistry& actions,
                      ActionBackend& backend, const ExploreOptions& options = {});

} // namespace mscflow
