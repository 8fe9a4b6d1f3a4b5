#include <cstdint>
#include <unordered_set>

#include "mscflow/error.hpp"
#include "mscflow/runtime.hpp"

namespace mscflow {

std::string_view to_string(ExploreResult::Verdict v) noexcept {
    switch (v) {
    case ExploreResult::Verdict::ok: return "ok";
    case ExploreResult::Verdict::stuck: return "stuck";
    case ExploreResult::Verdict::bounded: return "bounded";
    }
    return "?";
}

namespace {

// Everything that determines the future: continuations (by node identity),
// stores, invocation counters and channel contents. The log is excluded.
std::string state_key(const Configuration& c) {
    std::string k;
    for (const auto& [l, a] : c.agents) {
        k += l.name();
        k += '|';
        for (const auto& s : a.stack) {
            k += std::to_string(reinterpret_cast<std::uintptr_t>(s.ptr()));
            k += ',';
        }
        k += '|';
        for (const auto& [n, v] : a.store) {
            k += n;
            k += '=';
            k += v.to_source();
            k += ';';
        }
        k += '|';
        for (const auto& [n, i] : a.invocations) {
            k += n;
            k += '#';
            k += std::to_string(i);
            k += ';';
        }
        k += '\n';
    }
    for (const auto& [ch, q] : c.channels) {
        if (q.empty()) continue;
        k += ch.first.name() + ">" + ch.second.name() + ":";
        for (const auto& m : q) {
            if (m.control) k += "[" + m.control->str() + "]";
            for (const auto& v : m.values) k += v.to_source() + ",";
            k += ';';
        }
        k += '\n';
    }
    return k;
}

struct Explorer {
    const ExploreOptions& options;
    StepContext ctx;
    std::set<Lifeline> universe;
    std::unordered_set<std::string> seen;
    ExploreResult result;
    std::vector<Lifeline> schedule;

    bool dfs(const Configuration& c, std::size_t depth) {
        if (!seen.insert(state_key(c)).second) return false;
        ++result.states;
        if (options.observe) options.observe(c);
        if (c.final()) {
            ++result.terminal_states;
            result.terminal_traces.insert(trace_of(c.log, universe));
            return false;
        }
        auto en = enabled_steps(c);
        if (en.empty()) {
            result.verdict = ExploreResult::Verdict::stuck;
            result.witness_schedule = schedule;
            result.witness = c;
            return true;
        }
        if (depth >= options.depth) {
            ++result.frontier;
            return false;
        }
        for (const auto& e : en) {
            schedule.push_back(e.lifeline);
            if (dfs(step(c, e.lifeline, ctx), depth + 1)) return true;
            schedule.pop_back();
        }
        return false;
    }
};

} // namespace

ExploreResult explore(const DistributedProgram& d, const WorkflowDecl& decl,
                      const Inputs& inputs, const ActionRegistry& actions,
                      ActionBackend& backend, const ExploreOptions& options) {
    if (!backend.deterministic())
        throw Error(Errc::nondeterministic_backend,
                    "explore needs a deterministic (scripted or pure) backend");
    auto c = initial_configuration(d, decl, inputs);
    Explorer ex{options, StepContext{&actions, &backend, 0, 2}, {}, {}, {}, {}};
    for (const auto& [l, _] : c.agents) ex.universe.insert(l);
    if (!ex.dfs(c, 0) && ex.result.frontier > 0)
        ex.result.verdict = ExploreResult::Verdict::bounded;
    return std::move(ex.result);
}

} // namespace mscflow
