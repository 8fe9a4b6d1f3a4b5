#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <exception>
#include <mutex>
#include <thread>

#include "mscflow/error.hpp"
#include "mscflow/runtime.hpp"
#include "runtime_internal.hpp"

namespace mscflow {

using namespace detail;

namespace {

// Channels and the log live in one Configuration guarded by `mu`. Each
// thread touches only its own AgentState outside the lock.
struct Shared {
    Configuration config;
    std::mutex mu;
    std::condition_variable cv;
    std::size_t live = 0;
    std::size_t waiting = 0;
    bool deadlock = false;
    bool abort = false;
    std::exception_ptr error;
    std::atomic<std::size_t> seq{1};
};

void fail(Shared& s, std::exception_ptr e) {
    std::lock_guard<std::mutex> lock(s.mu);
    if (!s.error) s.error = e;
    s.abort = true;
    s.cv.notify_all();
}

// Exact deadlock test. Only called with waiting == live, so no thread is
// inside an action and every agent state is stable under the lock.
bool all_blocked(Shared& s) {
    for (auto& [l, a] : s.config.agents)
        if (!a.done() && head_step(s.config, l, a)) return false;
    return true;
}

void agent_loop(Shared& s, const Lifeline& at, const StepContext& ctx) {
    AgentState& a = s.config.agents.at(at);
    std::unique_lock<std::mutex> lock(s.mu);
    while (true) {
        if (s.abort || s.deadlock) return;
        if (a.done()) {
            --s.live;
            // The remaining lifelines may all be waiting already.
            if (s.live > 0 && s.waiting == s.live && all_blocked(s)) s.deadlock = true;
            s.cv.notify_all();
            return;
        }
        if (!head_step(s.config, at, a)) {
            ++s.waiting;
            if (s.waiting == s.live && all_blocked(s)) {
                s.deadlock = true;
                s.cv.notify_all();
            }
            s.cv.wait(lock, [&] { return s.abort || s.deadlock || head_step(s.config, at, a); });
            --s.waiting;
            continue;
        }
        const auto* act = a.stack.back().as<lp::Act>();
        if (!act) {
            // Sends and receives only touch channels; run them under the lock.
            s.config.next_seq = s.seq.fetch_add(1);
            apply_step(s.config, at, ctx);
            s.cv.notify_all();
            continue;
        }
        LocalProgram top = a.stack.back();
        a.stack.pop_back();
        auto inputs = eval(a, at, act->inputs);
        lock.unlock();
        auto outs = run_action(a, at, *act, inputs, ctx);
        lock.lock();
        for (std::size_t i = 0; i < act->outputs.size(); ++i)
            a.store[act->outputs[i].var_name()] = outs[i];
        s.config.next_seq = s.seq.fetch_add(1);
        record(s.config, Letter::action(at, act->outputs, act->action, act->inputs),
               std::move(outs), std::move(inputs));
        normalize(a);
    }
}

} // namespace

RunResult run_concurrent(const DistributedProgram& d, const WorkflowDecl& decl,
                         const Inputs& inputs, const ActionRegistry& actions,
                         ActionBackend& backend, const RunOptions& options) {
    Shared s;
    s.config = initial_configuration(d, decl, inputs);
    StepContext ctx{&actions, &backend, options.planner_depth, options.max_planner_depth};
    std::vector<Lifeline> lifelines;
    for (const auto& [l, _] : s.config.agents) lifelines.push_back(l);
    s.live = lifelines.size();

    std::vector<std::thread> threads;
    threads.reserve(lifelines.size());
    for (const auto& l : lifelines) {
        threads.emplace_back([&s, &ctx, l] {
            try {
                agent_loop(s, l, ctx);
            } catch (...) {
                fail(s, std::current_exception());
            }
        });
    }
    for (auto& t : threads) t.join();

    if (s.error) std::rethrow_exception(s.error);
    if (s.deadlock) {
        std::string msg = "concurrent run deadlocked; waiting:";
        for (const auto& [l, a] : s.config.agents)
            if (!a.done()) msg += " " + l.name();
        throw Error(Errc::stuck, msg);
    }
    // Events were appended in lock order; sort by sequence number for stability.
    std::stable_sort(s.config.log.begin(), s.config.log.end(),
                     [](const TraceEvent& x, const TraceEvent& y) { return x.seq < y.seq; });
    return finish_run(std::move(s.config), decl);
}

} // namespace mscflow
