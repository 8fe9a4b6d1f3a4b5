#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "mscflow/generators.hpp"

using namespace mscflow;
using namespace testing;

namespace {

auto typer(std::map<std::string, ValueType> m) {
    return [m](const std::string& v) -> std::optional<ValueType> {
        auto it = m.find(v);
        if (it == m.end()) return std::nullopt;
        return it->second;
    };
}

std::vector<std::string> codes(const std::vector<Diagnostic>& ds) {
    std::vector<std::string> out;
    for (const auto& d : ds) out.push_back(d.code);
    return out;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
    auto c = codes(ds);
    return std::find(c.begin(), c.end(), code) != c.end();
}

std::vector<Diagnostic> check_text(const std::string& wf, const std::string& acts = "") {
    auto d = parse_ok(wf);
    auto a = parse_actions(acts);
    REQUIRE(a.ok());
    return check_well_typed(d, *a.value);
}

} // namespace

TEST_CASE("payload matching") {
    auto s = typer({{"plan", ValueType::string}, {"x", ValueType::integer}});
    auto r = typer({{"plan", ValueType::string}, {"y", ValueType::string}});
    CHECK_FALSE(check_payload_match({var("plan")}, {var("plan")}, s, r));

    auto c = check_payload_match({boolean(true)}, {boolean(false)}, s, r);
    REQUIRE(c);
    CHECK(c->kind == PayloadMismatch::Kind::constant);
    CHECK(c->index == 1);

    auto t = check_payload_match({var("x")}, {var("y")}, s, r);
    REQUIRE(t);
    CHECK(t->kind == PayloadMismatch::Kind::type);
    CHECK(t->index == 1);

    auto l = check_payload_match({var("x"), var("x")}, {var("y")}, s, r);
    REQUIRE(l);
    CHECK(l->kind == PayloadMismatch::Kind::length);

    // Receiver constant needs the identical sender constant, not a variable.
    auto v = check_payload_match({var("plan")}, {str("plan")}, s, r);
    REQUIRE(v);
    CHECK(v->kind == PayloadMismatch::Kind::constant);
    CHECK_FALSE(check_payload_match({str("k"), var("plan")}, {str("k"), var("plan")}, s, r));
    // Constant sender into typed receiver variable.
    auto k = check_payload_match({str("k")}, {var("plan")}, s, r);
    CHECK_FALSE(k);
    auto k2 = check_payload_match({Atom::constant(Value::integer(3))}, {var("plan")}, s, r);
    REQUIRE(k2);
    CHECK(k2->kind == PayloadMismatch::Kind::type);
}

TEST_CASE("corpus workflows are well typed") {
    for (const char* stem : {"review", "consensus", "coin_toss", "nested", "broadcast5"}) {
        CAPTURE(stem);
        auto c = load(stem);
        auto ds = check_well_typed(c.decl, c.actions);
        for (const auto& d : ds) MESSAGE(d.message);
        CHECK(ds.empty());
    }
}

TEST_CASE("self channel is rejected") {
    auto c = load("review");
    auto text = read_text(source_path("workflows/review.msc"));
    auto pos = text.find("msg Planner(plan) -> Reviewer(plan)");
    REQUIRE(pos != std::string::npos);
    text.insert(pos, "msg Planner(plan) -> Planner(plan)\n        ");
    auto ds = check_well_typed(parse_ok(text), c.actions);
    CHECK(has_code(ds, "self-channel"));
}

TEST_CASE("consensus loop condition") {
    auto c = load("consensus");
    auto r = typecheck(c.decl, c.registry);
    CHECK(r.ok());
    CHECK(r.types.at({L("LLM1"), "agreed"}) == ValueType::boolean);
    CHECK(r.types.at({L("LLM1"), "trials"}) == ValueType::integer);
    CHECK(r.types.at({L("LLM1"), "max_rounds"}) == ValueType::integer);

    auto bad = check_text(R"(workflow f() -> int {
        var trials: int = 0 @ LLM1
        var s: str = "a" @ LLM1
        while (not s and trials < 3)@LLM1 { act LLM1 : trials = inc(trials) } exit { epsilon }
        return trials @ LLM1
    })", "pure inc(t: int) -> (t: int)");
    CHECK(has_code(bad, "condition-type"));

    auto unavailable = check_text(R"(workflow f() -> int {
        var trials: int = 0 @ LLM1
        while (not agreed)@LLM1 { act LLM1 : trials = inc(trials) } exit { epsilon }
        return trials @ LLM1
    })", "pure inc(t: int) -> (t: int)");
    CHECK(has_code(unavailable, "unavailable"));
}

TEST_CASE("branch join is intersection") {
    const char* acts = "pure f(x: str) -> (y: str)";
    auto one_branch = check_text(R"(workflow w(x: str @ A, c: bool @ A) -> str {
        if c@A then { act A : y = f(x) } else { epsilon }
        return y @ A
    })", acts);
    CHECK(has_code(one_branch, "return-unavailable"));

    auto both = check_text(R"(workflow w(x: str @ A, c: bool @ A) -> str {
        if c@A then { act A : y = f(x) } else { act A : y = f(x) }
        return y @ A
    })", acts);
    CHECK(both.empty());

    auto predeclared = check_text(R"(workflow w(x: str @ A, c: bool @ A) -> str {
        var y: str = "none" @ A
        if c@A then { act A : y = f(x) } else { epsilon }
        return y @ A
    })", acts);
    CHECK(predeclared.empty());

    auto loop = check_text(R"(workflow w(x: str @ A, c: bool @ A) -> str {
        while c@A do { act A : y = f(x) } exit { epsilon }
        return y @ A
    })", acts);
    CHECK(has_code(loop, "return-unavailable"));

    AvailabilityEnv a, b;
    a.bind(L("A"), "x", ValueType::string);
    a.bind(L("A"), "y", ValueType::integer);
    b.bind(L("A"), "x", ValueType::string);
    b.bind(L("A"), "y", ValueType::string);
    auto j = AvailabilityEnv::intersect(a, b);
    CHECK(j.available(L("A"), "x"));
    CHECK_FALSE(j.available(L("A"), "y"));
}

TEST_CASE("action checks") {
    const char* acts = "pure f(x: str) -> (y: str)\npure g(n: int) -> (a: int, b: bool)";
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        act A : y = h(x)
        return y @ A })", acts), "unknown-action"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        act A : y = f(x, x)
        return y @ A })", acts), "arity"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> int {
        act A : a = g(1)
        return a @ A })", acts), "arity"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> int {
        act A : (a, b) = g(x)
        return a @ A })", acts), "input-type"));
    // Input constants are allowed.
    CHECK(check_text(R"(workflow w(x: str @ A) -> int {
        act A : (a, b) = g(4)
        return a @ A })", acts).empty());
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        act B : y = f(x)
        return x @ A })", acts), "unavailable"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> bool {
        return x @ A })", acts), "return-type"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        var n: int = "no" @ A
        return x @ A })", acts), "initializer-type"));
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        act A : x = g(3)
        return x @ A })", "pure g(n: int) -> (a: int)"), "variable-type"));
}

TEST_CASE("received variables become available at the receiver") {
    const char* acts = "pure f(x: str) -> (y: str)";
    CHECK(check_text(R"(workflow w(x: str @ A) -> str {
        msg A(x) -> B(z)
        act B : y = f(z)
        return y @ B })", acts).empty());
    CHECK(has_code(check_text(R"(workflow w(x: str @ A) -> str {
        act B : y = f(x)
        msg A(x) -> B(x)
        return y @ B })", acts), "unavailable"));
}

TEST_CASE("diagnostics are deterministic") {
    const char* wf = R"(workflow w(x: str @ A) -> bool {
        act B : y = f(q)
        msg A(x) -> A(x)
        return x @ A })";
    auto a = check_text(wf, "pure f(x: str) -> (y: str)");
    auto b = check_text(wf, "pure f(x: str) -> (y: str)");
    CHECK(codes(a) == codes(b));
    CHECK(a.size() >= 3);
    for (const auto& d : a) CHECK(format_diagnostic("w.msc", d).rfind("w.msc:", 0) == 0);
}

TEST_CASE("generated workflows are well typed") {
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        auto c = random_workflow(rng, GeneratorConfig{3 + static_cast<std::size_t>(i % 3), 10, 2});
        auto ds = check_well_typed(c.decl, c.actions);
        if (!ds.empty()) MESSAGE(pretty_print(c.decl) << ds[0].message);
        CHECK(ds.empty());
    }
}
