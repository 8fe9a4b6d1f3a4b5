#include <doctest.h>

#include "helpers.hpp"
#include "mscflow/generators.hpp"
#include "mscflow/parser.hpp"

using namespace mscflow;
using namespace testing;

namespace {

std::size_t count_if_nodes(const GlobalWorkflow& p, bool loops) {
    std::size_t n = 0;
    if (auto s = p.as<gw::Seq>()) return count_if_nodes(s->first, loops) + count_if_nodes(s->second, loops);
    if (auto i = p.as<gw::If>())
        n = (loops ? 0 : 1) + count_if_nodes(i->then_branch, loops) + count_if_nodes(i->else_branch, loops);
    if (auto w = p.as<gw::While>())
        n = (loops ? 1 : 0) + count_if_nodes(w->body, loops) + count_if_nodes(w->exit, loops);
    return n;
}

void check_round_trip(const WorkflowDecl& d) {
    auto text = pretty_print(d);
    auto again = parse_workflow(text);
    REQUIRE_MESSAGE(again.ok(), text);
    CHECK_MESSAGE(assign_control_tags(*again.value) == assign_control_tags(d), text);
}

void check_spans(const std::string& text) {
    auto r = parse_unit(text);
    for (const auto& d : r.diagnostics) {
        CHECK(d.span.begin <= d.span.end);
        CHECK(d.span.end <= text.size());
        CHECK(d.span.line >= 1);
    }
}

} // namespace

TEST_CASE("review workflow parses") {
    auto c = load("review");
    CHECK(c.decl.name == "reviewed_execution");
    CHECK(c.decl.lifelines().size() == 4);
    CHECK(count_if_nodes(c.decl.body, false) == 1);
    CHECK(count_if_nodes(c.decl.body, true) == 0);
    CHECK(c.decl.return_var == "summary");
    CHECK(c.decl.return_at == L("Orchestrator"));
    REQUIRE(c.decl.vars.size() == 1);
    CHECK(c.decl.vars[0].initial == Value::string("no review"));
}

TEST_CASE("consensus workflow parses") {
    auto c = load("consensus");
    CHECK(count_if_nodes(c.decl.body, true) == 1);
    std::function<const gw::While*(const GlobalWorkflow&)> find = [&](const GlobalWorkflow& p) -> const gw::While* {
        if (auto w = p.as<gw::While>()) return w;
        if (auto s = p.as<gw::Seq>()) {
            if (auto w = find(s->first)) return w;
            return find(s->second);
        }
        return nullptr;
    };
    auto w = find(c.decl.body);
    REQUIRE(w);
    CHECK(w->owner == L("LLM1"));
    CHECK(w->exit.is_epsilon());
    CHECK(w->cond.to_source() == "not agreed and trials < max_rounds");
}

TEST_CASE("empty body") {
    auto d = parse_ok("workflow f(x: str @ A) -> str { return x @ A }");
    CHECK(d.body.is_epsilon());
    CHECK(d.params.size() == 1);
}

TEST_CASE("consensus action declarations") {
    auto c = load("consensus");
    const auto& assess = c.registry.at("assess");
    CHECK(assess.kind == ActionKind::llm);
    REQUIRE(assess.outputs.size() == 2);
    CHECK(assess.outputs[0] == TypedName{"verdict", ValueType::string});
    CHECK(assess.outputs[1] == TypedName{"reason", ValueType::string});
    CHECK(assess.parse_mode == "json");
    CHECK(assess.user_template == "Notes: {{notes}}\nDiagnosis: {{diag}}");

    auto p = parse_actions("pure inc_trials(trials: int) -> (trials: int)");
    REQUIRE(p.ok());
    REQUIRE(p.value->size() == 1);
    CHECK(p.value->at(0).kind == ActionKind::pure);
    CHECK(p.value->at(0).inputs == std::vector<TypedName>{{"trials", ValueType::integer}});

    auto empty = parse_actions("");
    REQUIRE(empty.ok());
    CHECK(empty.value->empty());
}

TEST_CASE("action declaration errors") {
    auto bad_mode = parse_actions(R"(llm f(x: str) -> (y: str) { system: "s" user: "u" parse: yaml })");
    CHECK_FALSE(bad_mode.ok());
    auto bad_placeholder = parse_actions(R"(llm f(x: str) -> (y: str) { system: "s" user: "{{z}}" parse: json })");
    REQUIRE_FALSE(bad_placeholder.ok());
    CHECK(bad_placeholder.diagnostics[0].code == "placeholder");
}

TEST_CASE("round trip of the corpus") {
    for (const char* stem : {"review", "consensus", "coin_toss", "nested", "broadcast5"}) {
        CAPTURE(stem);
        check_round_trip(load(stem).decl);
    }
    auto c = load("consensus");
    for (const auto& a : c.actions) {
        auto again = parse_actions(pretty_print(a));
        REQUIRE(again.ok());
        CHECK(again.value->at(0) == a);
    }
}

TEST_CASE("round trip of random workflows") {
    Rng rng(3);
    for (int i = 0; i < 200; ++i) check_round_trip(random_workflow(rng, GeneratorConfig{3, 10, 3}).decl);
}

TEST_CASE("surface variants") {
    auto a = parse_ok(R"(workflow f() -> bool {
        var c: bool = true @ B
        while c@B do { act B : c = g(c) } exit { epsilon }
        if c@B then { act B : c = g(c) }
        return c @ B
    })");
    auto b = parse_ok(R"(workflow f() -> bool {
        var c: bool = true @ B
        while (c)@B { act B : c = g(c) } exit { epsilon }
        if c@B then { act B : c = g(c) } else { epsilon }
        return c @ B
    })");
    CHECK(a == b);
    // Printer emits the parenthesised while form and an `epsilon` exit block.
    auto text = pretty_print(a);
    CHECK(text.find("while (c)@B {") != std::string::npos);
    CHECK(text.find("} exit {\n        epsilon\n    }") != std::string::npos);
}

TEST_CASE("comments and whitespace are ignored") {
    auto a = parse_ok("workflow f(x: str @ A) -> str { // hi\n msg A(x) -> B(x) // there\n return x @ A }");
    auto b = parse_ok("workflow f(x: str @ A) -> str { msg A(x) -> B(x) return x @ A }");
    CHECK(a == b);
}

TEST_CASE("syntax errors carry spans") {
    const char* bad[] = {
        "workflow f(x: str @ A) -> str { msg A(x) -> B(x) }",   // missing return
        "workflow f(x: str @ A) -> str { msg A(x) B(x) return x @ A }",
        "workflow f(x: str @ A) -> str { act A : y = f(x return x @ A }",
        "workflow f(x: str @ A) -> str { msg A(\"unterminated) -> B(x) return x @ A }",
        "workflow f(x: str @ A) -> str { return x @ A } trailing",
        "workflow f(x: blob @ A) -> str { return x @ A }",
        "workflow f(__ctrl_0: str @ A) -> str { return __ctrl_0 @ A }",
        "",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        auto r = parse_workflow(text);
        CHECK_FALSE(r.ok());
        CHECK_FALSE(r.diagnostics.empty());
        check_spans(text);
    }
    auto missing = parse_workflow("workflow f(x: str @ A) -> str { msg A(x) -> B(x) }");
    REQUIRE_FALSE(missing.diagnostics.empty());
    CHECK(missing.diagnostics[0].span.line == 1);
}

TEST_CASE("reserved prefix is rejected") {
    auto r = parse_workflow("workflow f(x: str @ A) -> str { msg A(x) -> B(__ctrl_x) return x @ A }");
    REQUIRE_FALSE(r.ok());
    CHECK(r.diagnostics[0].code == "reserved");
}

TEST_CASE("conditions") {
    auto c = parse_condition("not agreed and trials < max_rounds");
    REQUIRE(c.ok());
    CHECK(c.value->op() == Condition::Op::conj);
    CHECK(c.value->lhs().op() == Condition::Op::negate);
    CHECK(c.value->rhs().op() == Condition::Op::lt);
    auto d = parse_condition("(a or b) and s == \"x\" and n <= 3");
    REQUIRE(d.ok());
    auto again = parse_condition(d.value->to_source());
    REQUIRE(again.ok());
    CHECK(*again.value == *d.value);
}
