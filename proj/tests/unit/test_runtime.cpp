#include <doctest.h>

#include <sstream>

#include "helpers.hpp"
#include "mscflow/error.hpp"
#include "mscflow/generators.hpp"
#include "mscflow/projection.hpp"
#include "mscflow/runtime.hpp"

using namespace mscflow;
using namespace testing;

namespace {

Script script(const std::string& name) {
    return Script::load(source_path("workflows/scripts/" + name + ".json"));
}

Errc code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error raised");
    return Errc::io;
}

std::size_t control_receives(const std::vector<TraceEvent>& log, const Lifeline& at) {
    std::size_t n = 0;
    for (const auto& e : log)
        if (e.letter.at() == at && e.letter.is_recv() && e.letter.is_control()) ++n;
    return n;
}

std::size_t control_receives(const LocalWord& w) {
    std::size_t n = 0;
    for (const auto& l : w) n += l.is_recv() && l.is_control();
    return n;
}

// Two lifelines, both declared, with a trivial return.
WorkflowDecl pair_decl() {
    return parse_ok(R"(workflow w() -> int {
        var n: int = 0 @ A
        var m: int = 0 @ B
        return n @ A
    })");
}

const Inputs review_inputs{{"task", Value::string("deploy the service")}};
const Inputs consensus_inputs{{"notes", Value::string("fever, lactate 4.1")},
                              {"diagnosis", Value::string("sepsis")}};

} // namespace

TEST_CASE("initial configuration") {
    auto c = load("consensus");
    auto d = project_all(c.decl);
    auto cfg = initial_configuration(d, c.decl, consensus_inputs);
    CHECK(cfg.agents.at(L("User")).store.at("notes") == Value::string("fever, lactate 4.1"));
    CHECK(cfg.agents.at(L("User")).store.at("diagnosis") == Value::string("sepsis"));
    CHECK(cfg.agents.at(L("LLM1")).store ==
          std::map<std::string, Value>{{"trials", Value::integer(0)}, {"max_rounds", Value::integer(3)}});
    CHECK(cfg.agents.at(L("LLM2")).store.empty());
    CHECK(cfg.log.empty());
    for (const auto& [ch, q] : cfg.channels) CHECK(q.empty());

    auto coin = load("coin_toss");
    auto cc = initial_configuration(project_all(coin.decl), coin.decl, {});
    for (const auto& [l, a] : cc.agents) CHECK(a.store.empty());

    auto l1 = load("review");
    auto d1 = project_all(l1.decl);
    CHECK(code_of([&] { initial_configuration(d1, l1.decl, {}); }) == Errc::input);
    CHECK(code_of([&] { initial_configuration(d1, l1.decl, {{"task", Value::integer(3)}}); }) == Errc::input);
    CHECK(code_of([&] {
              initial_configuration(d1, l1.decl, {{"task", Value::string("x")}, {"other", Value::string("y")}});
          }) == Errc::input);
    auto qualified = initial_configuration(d1, l1.decl, {{"Planner.task", Value::string("x")}});
    CHECK(qualified.agents.at(L("Planner")).store.at("task") == Value::string("x"));
}

TEST_CASE("receives wait on their own channel") {
    auto c = load("review");
    auto d = project_all(c.decl);
    ScriptBackend backend(script("review_critique"));
    StepContext ctx{&c.registry, &backend};
    auto cfg = initial_configuration(d, c.decl, review_inputs);
    auto P = L("Planner"), E = L("Executor"), O = L("Orchestrator");
    for (int i = 0; i < 6; ++i) apply_step(cfg, P, ctx); // act, choice, 2 ctrl, plan to R, plan to E
    apply_step(cfg, O, ctx);                             // control receive
    for (int i = 0; i < 3; ++i) apply_step(cfg, E, ctx); // recv, act, send
    CHECK(cfg.channels[{E, O}].size() == 1);
    CHECK(cfg.channels[{L("Reviewer"), O}].empty());
    bool orchestrator = false, reviewer = false;
    for (const auto& s : enabled_steps(cfg)) {
        orchestrator |= s.lifeline == O;
        reviewer |= s.lifeline == L("Reviewer");
    }
    CHECK_FALSE(orchestrator);
    CHECK(reviewer);
    CHECK(code_of([&] { apply_step(cfg, O, ctx); }) == Errc::contract);
}

TEST_CASE("enabled steps") {
    auto decl = pair_decl();
    DistributedProgram done{{L("A"), lp::epsilon()}, {L("B"), lp::epsilon()}};
    auto c0 = initial_configuration(done, decl, {});
    CHECK(enabled_steps(c0).empty());
    CHECK(c0.final());

    DistributedProgram sends{{L("A"), lp::send({Atom::constant(Value::integer(1))}, L("B"))},
                             {L("B"), lp::recv({var("m")}, L("A"))}};
    auto c1 = initial_configuration(sends, decl, {});
    auto en = enabled_steps(c1);
    REQUIRE(en.size() == 1);
    CHECK(en[0].lifeline == L("A"));
    CHECK(en[0].kind == StepKind::send);
}

TEST_CASE("step semantics") {
    auto decl = pair_decl();
    auto reg = make_registry(*parse_actions("pure check_agreement(a: str, b: str) -> (agreed: bool)").value);
    PureBackend pure;
    StepContext ctx{&reg, &pure};

    DistributedProgram agree{{L("A"), lp::act({var("agreed")}, "check_agreement", {str("yes"), str("yes")})},
                             {L("B"), lp::epsilon()}};
    auto c = initial_configuration(agree, decl, {});
    apply_step(c, L("A"), ctx);
    CHECK(c.agents.at(L("A")).store.at("agreed") == Value::boolean(true));
    REQUIRE(c.log.size() == 1);
    CHECK(c.log[0].letter.kind() == Letter::Kind::action);

    ControlTag tag("0");
    DistributedProgram loop{
        {L("A"), lp::send({boolean(true)}, L("B"), tag)},
        {L("B"), lp::while_recv(L("A"), tag, "__ctrl_0", lp::act({var("m")}, "inc_trials", {var("m")}), lp::epsilon())}};
    auto reg2 = make_registry(*parse_actions("pure inc_trials(t: int) -> (t: int)").value);
    StepContext ctx2{&reg2, &pure};
    auto l = initial_configuration(loop, decl, {});
    apply_step(l, L("A"), ctx2);
    apply_step(l, L("B"), ctx2);
    REQUIRE(l.log.size() == 2);
    CHECK(l.log[1].letter.is_control());
    CHECK(l.log[1].values == std::vector<Value>{Value::boolean(true)});
    apply_step(l, L("B"), ctx2);
    CHECK(l.agents.at(L("B")).store.at("m") == Value::integer(1));
    // Back at the loop head, waiting for the next decision.
    CHECK(enabled_steps(l).empty());
    CHECK_FALSE(l.final());
}

TEST_CASE("receiver constant mismatch") {
    auto decl = pair_decl();
    DistributedProgram d{{L("A"), lp::send({boolean(false)}, L("B"))},
                         {L("B"), lp::recv({boolean(true)}, L("A"))}};
    ActionRegistry reg;
    PureBackend pure;
    CHECK(code_of([&] { run(d, decl, {}, reg, pure); }) == Errc::receiver_constant_mismatch);
}

TEST_CASE("read before write") {
    auto decl = pair_decl();
    DistributedProgram d{{L("A"), lp::send({var("never")}, L("B"))}, {L("B"), lp::recv({var("m")}, L("A"))}};
    ActionRegistry reg;
    PureBackend pure;
    CHECK(code_of([&] { run(d, decl, {}, reg, pure); }) == Errc::read_before_write);
}

TEST_CASE("review workflow runs") {
    auto c = load("review");
    auto d = project_all(c.decl);
    ScriptBackend review(script("review_critique"));
    auto r = run(d, c.decl, review_inputs, c.registry, review);
    CHECK(r.result == Value::string("done; review addressed"));
    CHECK_FALSE(r.trace.word(L("Reviewer")).empty());
    CHECK(is_complete(r.trace));
    CHECK(r.final_state.agents.at(L("Orchestrator")).store.at("critique") ==
          Value::string("deploy step lacks a rollback"));

    ScriptBackend skip(script("review_skip"));
    auto s = run(d, c.decl, review_inputs, c.registry, skip);
    CHECK(s.result == Value::string("hello printed"));
    CHECK(s.final_state.agents.at(L("Orchestrator")).store.at("critique") == Value::string("no review"));
    // Reviewer only sees the decision.
    CHECK(s.trace.word(L("Reviewer")).size() == 1);
}

TEST_CASE("consensus workflow runs") {
    auto c = load("consensus");
    auto d = project_all(c.decl);
    ScriptBackend now(script("consensus_agree_now"));
    auto r = run(d, c.decl, consensus_inputs, c.registry, now);
    CHECK(r.result == Value::string("yes"));
    CHECK(control_receives(r.log, L("LLM2")) == 1);
    CHECK(r.final_state.agents.at(L("LLM1")).store.at("trials") == Value::integer(0));
    for (const auto& e : r.log)
        if (e.letter.at() == L("LLM2") && e.letter.is_control()) CHECK(e.values == std::vector<Value>{Value::boolean(false)});

    ScriptBackend never(script("consensus_never_agree"));
    auto n = run(d, c.decl, consensus_inputs, c.registry, never);
    CHECK(n.result == Value::string("unknown"));
    CHECK(n.final_state.agents.at(L("LLM1")).store.at("trials") == Value::integer(3));
    CHECK(control_receives(n.log, L("LLM2")) == 4);

    ScriptBackend round2(script("consensus_agree_round2"));
    auto t = run(d, c.decl, consensus_inputs, c.registry, round2);
    CHECK(t.result == Value::string("yes"));
    CHECK(t.final_state.agents.at(L("LLM1")).store.at("trials") == Value::integer(2));
}

TEST_CASE("empty body") {
    auto decl = parse_ok("workflow f(x: str @ A) -> str { return x @ A }");
    ActionRegistry reg;
    PureBackend pure;
    auto r = run(project_all(decl), decl, {{"x", Value::string("hi")}}, reg, pure);
    CHECK(r.result == Value::string("hi"));
    CHECK(r.trace.empty());
    CHECK(r.log.empty());
}

TEST_CASE("explore") {
    auto c = load("review");
    auto d = project_all(c.decl);
    ScriptBackend review(script("review_critique"));
    bool raced = false;
    ExploreOptions opts;
    opts.observe = [&](const Configuration& cfg) {
        auto eo = cfg.channels.find({L("Executor"), L("Orchestrator")});
        auto pr = cfg.channels.find({L("Planner"), L("Reviewer")});
        if (eo != cfg.channels.end() && pr != cfg.channels.end() && !eo->second.empty())
            for (const auto& m : pr->second) raced |= !m.control;
    };
    auto r = explore(d, c.decl, review_inputs, c.registry, review, opts);
    CHECK(r.verdict == ExploreResult::Verdict::ok);
    CHECK(raced);
    CHECK(r.terminal_traces.size() == 1);
    CHECK(r.states > 20);

    auto coin = load("coin_toss");
    ScriptBackend heads(script("coin_toss_2heads"));
    auto cr = explore(project_all(coin.decl), coin.decl, {}, coin.registry, heads);
    CHECK(cr.verdict == ExploreResult::Verdict::ok);
    REQUIRE(cr.terminal_traces.size() == 1);
    CHECK(control_receives(cr.terminal_traces.begin()->second.word(L("B"))) == 3);

    auto bounded = explore(d, c.decl, review_inputs, c.registry, review, ExploreOptions{5, {}});
    CHECK(bounded.verdict == ExploreResult::Verdict::bounded);
    CHECK(bounded.frontier > 0);
}

TEST_CASE("explore finds a receive cross") {
    auto decl = pair_decl();
    DistributedProgram d{
        {L("A"), lp::seq(lp::recv({var("n")}, L("B")), lp::send({var("n")}, L("B")))},
        {L("B"), lp::seq(lp::recv({var("m")}, L("A")), lp::send({var("m")}, L("A")))}};
    ActionRegistry reg;
    PureBackend pure;
    auto r = explore(d, decl, {}, reg, pure);
    CHECK(r.verdict == ExploreResult::Verdict::stuck);
    REQUIRE(r.witness);
    CHECK(r.witness_schedule.empty());
    CHECK(code_of([&] { run(d, decl, {}, reg, pure); }) == Errc::stuck);
    CHECK(code_of([&] { run_concurrent(d, decl, {}, reg, pure); }) == Errc::stuck);
}

TEST_CASE("explore rejects nondeterministic backends") {
    struct Coin : ActionBackend {
        std::vector<Value> invoke(const ActionDecl&, const std::vector<Value>&, const InvocationContext&) override {
            return {Value::boolean(true)};
        }
    } coin;
    auto c = load("coin_toss");
    CHECK(code_of([&] { explore(project_all(c.decl), c.decl, {}, c.registry, coin); }) ==
          Errc::nondeterministic_backend);
}

TEST_CASE("scheduler independence") {
    Rng rng(61);
    auto reg = make_registry(generator_actions());
    for (int i = 0; i < 60; ++i) {
        auto c = random_workflow(rng, GeneratorConfig{3, 10, 2});
        auto d = project_all(c.decl);
        PureBackend pure(generator_pure_registry());
        auto base = run(d, c.decl, {}, reg, pure);
        for (std::uint64_t seed : {1u, 2u, 3u}) {
            RunOptions opts;
            opts.scheduler = Scheduler::random(seed + 100 * i);
            auto other = run(d, c.decl, {}, reg, pure, opts);
            CHECK(other.result == base.result);
            CHECK(other.trace == base.trace);
        }
    }
}

TEST_CASE("scripted scheduler") {
    auto c = load("review");
    auto d = project_all(c.decl);
    ScriptBackend review(script("review_critique"));
    RunOptions opts;
    opts.scheduler = Scheduler::scripted({L("Planner"), L("Planner"), L("Planner")});
    auto r = run(d, c.decl, review_inputs, c.registry, review, opts);
    CHECK(r.log.size() > 3);
    for (int i = 0; i < 3; ++i) CHECK(r.log[static_cast<std::size_t>(i)].letter.at() == L("Planner"));
    opts.scheduler = Scheduler::scripted({L("Executor")});
    CHECK(code_of([&] { run(d, c.decl, review_inputs, c.registry, review, opts); }) == Errc::contract);
}

TEST_CASE("concurrent mode matches the interleaving per lifeline") {
    for (int rep = 0; rep < 10; ++rep) {
        auto c = load("consensus");
        auto d = project_all(c.decl);
        ScriptBackend a(script("consensus_agree_round2"));
        ScriptBackend b(script("consensus_agree_round2"));
        auto seq = run(d, c.decl, consensus_inputs, c.registry, a);
        auto con = run_concurrent(d, c.decl, consensus_inputs, c.registry, b);
        CHECK(con.result == seq.result);
        CHECK(con.trace == seq.trace);
        for (std::size_t i = 1; i < con.log.size(); ++i) CHECK(con.log[i - 1].seq < con.log[i].seq);
    }
    Rng rng(67);
    auto reg = make_registry(generator_actions());
    for (int i = 0; i < 20; ++i) {
        auto c = random_workflow(rng);
        auto d = project_all(c.decl);
        PureBackend pure(generator_pure_registry());
        CHECK(run_concurrent(d, c.decl, {}, reg, pure).trace == run(d, c.decl, {}, reg, pure).trace);
    }
}

TEST_CASE("event log") {
    auto c = load("review");
    ScriptBackend review(script("review_critique"));
    auto r = run(project_all(c.decl), c.decl, review_inputs, c.registry, review);
    auto text = log_to_ndjson(r.log);
    std::istringstream in(text);
    std::string line;
    std::size_t n = 0, last = 0;
    while (std::getline(in, line)) {
        auto j = nlohmann::json::parse(line);
        CHECK(j.at("seq").get<std::size_t>() > last);
        last = j.at("seq").get<std::size_t>();
        ++n;
    }
    CHECK(n == r.log.size());
    CHECK(trace_of(r.log, c.decl.lifelines()) == r.trace);
    for (std::size_t i = 1; i < r.log.size(); ++i) CHECK(r.log[i - 1].seq < r.log[i].seq);
}

TEST_CASE("step budget") {
    auto c = load("consensus");
    ScriptBackend never(script("consensus_never_agree"));
    RunOptions opts;
    opts.max_steps = 5;
    CHECK(code_of([&] { run(project_all(c.decl), c.decl, consensus_inputs, c.registry, never, opts); }) ==
          Errc::resource_exceeded);
}
