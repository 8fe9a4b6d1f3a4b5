#include <doctest.h>

#include <algorithm>
#include <random>

#include "helpers.hpp"
#include "mscflow/error.hpp"
#include "mscflow/msc.hpp"
#include "mscflow/projection.hpp"

using namespace mscflow;
using namespace testing;

namespace {

const std::set<Lifeline> AB{Lifeline("A"), Lifeline("B")};

// Brute-force oracle: a tuple is an MSC iff receives are matched by the
// n-th send of the channel with matching payload and some permutation of
// the events respects program order and matching.
bool oracle_is_msc(const MscTuple& m) {
    std::vector<EventRef> events;
    std::map<EventRef, EventRef> match; // recv -> send
    for (const auto& [l, w] : m.words()) {
        std::map<Lifeline, std::size_t> seen;
        for (std::size_t i = 0; i < w.size(); ++i) {
            events.push_back({l, i + 1});
            if (!w[i].is_recv()) continue;
            std::size_t n = ++seen[w[i].peer()];
            const auto& sw = m.word(w[i].peer());
            std::size_t k = 0;
            bool found = false;
            for (std::size_t j = 0; j < sw.size(); ++j) {
                if (sw[j].is_send() && sw[j].peer() == l && ++k == n) {
                    if (!payload_matches(sw[j].payload(), w[i].payload())) return false;
                    match[{l, i + 1}] = {w[i].peer(), j + 1};
                    found = true;
                    break;
                }
            }
            if (!found) return false;
        }
    }
    std::sort(events.begin(), events.end());
    do {
        std::map<EventRef, std::size_t> pos;
        for (std::size_t i = 0; i < events.size(); ++i) pos[events[i]] = i;
        bool ok = true;
        for (const auto& e : events) {
            if (e.index > 1 && pos[{e.lifeline, e.index - 1}] > pos[e]) ok = false;
            auto it = match.find(e);
            if (it != match.end() && pos[it->second] > pos[e]) ok = false;
        }
        if (ok) return true;
    } while (std::next_permutation(events.begin(), events.end()));
    return false;
}

MscTuple random_tuple(std::mt19937_64& rng, std::size_t max_events) {
    MscTuple m(AB);
    std::uniform_int_distribution<int> coin(0, 3);
    std::size_t n = std::uniform_int_distribution<std::size_t>(0, max_events)(rng);
    for (std::size_t i = 0; i < n; ++i) {
        Lifeline at = coin(rng) % 2 ? Lifeline("A") : Lifeline("B");
        Lifeline other = at == Lifeline("A") ? Lifeline("B") : Lifeline("A");
        Payload p = {coin(rng) == 0 ? boolean(false) : var("x")};
        if (coin(rng) % 2) m.append(Letter::send(at, p, other));
        else m.append(Letter::recv(at, {coin(rng) == 0 ? boolean(true) : var("y")}, other));
    }
    return m;
}

} // namespace

TEST_CASE("fifo relation") {
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    auto f = fifo_relation(m);
    REQUIRE(f.size() == 1);
    CHECK(f[0].first == EventRef{L("A"), 1});
    CHECK(f[0].second == EventRef{L("B"), 1});

    CHECK(fifo_relation(MscTuple(AB)).empty());

    MscTuple two(AB);
    two.append(Letter::send(L("A"), {var("x")}, L("B")));
    two.append(Letter::send(L("A"), {var("x")}, L("B")));
    two.append(Letter::recv(L("B"), {var("y")}, L("A")));
    auto g = fifo_relation(two);
    REQUIRE(g.size() == 1);
    CHECK(g[0].first == EventRef{L("A"), 1});
    CHECK(g[0].second == EventRef{L("B"), 1});
}

TEST_CASE("canonical constructions are complete MSCs") {
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    CHECK(is_msc(m));
    CHECK(is_complete(m));
    auto a = msc_action(AB, L("A"), {var("y")}, "f", {var("x")});
    CHECK(is_msc(a));
    CHECK(a.word(L("B")).empty());
    auto c = msc_choice(AB, ChoiceKind::while_false, Condition::var("c"), L("B"));
    CHECK(is_msc(c));
    CHECK(c.word(L("B"))[0].key() == "whF(c)@B");

    MscTuple lone(AB);
    lone.append(Letter::send(L("A"), {var("x")}, L("B")));
    CHECK(is_msc(lone));
    CHECK_FALSE(is_complete(lone));
}

TEST_CASE("msc violations") {
    MscTuple unmatched(AB);
    unmatched.append(Letter::recv(L("B"), {var("x")}, L("A")));
    auto r = is_msc(unmatched);
    REQUIRE(r.violation);
    CHECK(r.violation->kind == MscViolation::Kind::unmatched_receive);
    CHECK(r.violation->events == std::vector<EventRef>{{L("B"), 1}});
    CHECK_THROWS_AS(is_complete(unmatched), Error);

    MscTuple wrong_const(AB);
    wrong_const.append(Letter::send(L("A"), {boolean(true)}, L("B")));
    wrong_const.append(Letter::recv(L("B"), {boolean(false)}, L("A")));
    auto p = is_msc(wrong_const);
    REQUIRE(p.violation);
    CHECK(p.violation->kind == MscViolation::Kind::payload_mismatch);

    MscTuple cyc(AB);
    cyc.append(Letter::recv(L("A"), {var("y")}, L("B")));
    cyc.append(Letter::send(L("A"), {var("x")}, L("B")));
    cyc.append(Letter::recv(L("B"), {var("x")}, L("A")));
    cyc.append(Letter::send(L("B"), {var("y")}, L("A")));
    CHECK_FALSE(oracle_is_msc(cyc));
    auto c = is_msc(cyc);
    REQUIRE(c.violation);
    CHECK(c.violation->kind == MscViolation::Kind::cycle);
}

TEST_CASE("is_msc agrees with a brute-force oracle") {
    std::mt19937_64 rng(17);
    std::size_t positives = 0;
    for (int i = 0; i < 1500; ++i) {
        auto m = random_tuple(rng, 7);
        bool expect = oracle_is_msc(m);
        positives += expect;
        CHECK_MESSAGE(is_msc(m).ok() == expect, m.to_string());
    }
    CHECK(positives > 50);
}

TEST_CASE("fifo relation is injective and order preserving") {
    std::mt19937_64 rng(19);
    for (int i = 0; i < 300; ++i) {
        auto m = random_tuple(rng, 10);
        auto f = fifo_relation(m);
        std::set<EventRef> s, r;
        for (const auto& [a, b] : f) {
            CHECK(s.insert(a).second);
            CHECK(r.insert(b).second);
        }
        for (std::size_t x = 0; x < f.size(); ++x)
            for (std::size_t y = 0; y < f.size(); ++y)
                if (f[x].first.lifeline == f[y].first.lifeline &&
                    f[x].second.lifeline == f[y].second.lifeline && f[x].first.index < f[y].first.index)
                    CHECK(f[x].second.index < f[y].second.index);
    }
}

TEST_CASE("concat") {
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    CHECK(concat(m, MscTuple(AB)) == m);
    CHECK(concat(MscTuple(AB), m) == m);
    auto mm = concat(m, m);
    auto f = fifo_relation(mm);
    REQUIRE(f.size() == 2);
    CHECK(f[0] == FifoPair{{L("A"), 1}, {L("B"), 1}});
    CHECK(f[1] == FifoPair{{L("A"), 2}, {L("B"), 2}});
    CHECK_THROWS_AS(concat(m, MscTuple({L("A")})), Error);
}

TEST_CASE("concatenation lemmas on random tuples") {
    std::mt19937_64 rng(23);
    std::size_t used = 0;
    for (int i = 0; i < 3000; ++i) {
        auto c = random_tuple(rng, 6);
        auto n = random_tuple(rng, 6);
        if (!is_msc(c) || !is_complete(c)) continue;
        ++used;
        auto cn = concat(c, n);
        CHECK(is_msc(cn).ok() == is_msc(n).ok());
        if (is_msc(n)) CHECK(is_complete(cn) == is_complete(n));
    }
    CHECK(used > 100);
}

TEST_CASE("erase") {
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    CHECK(erase(m) == m);

    std::set<Lifeline> ls{L("O"), L("P"), L("Q")};
    auto d = decision_block(L("O"), true, ControlTag("0.1"), {L("P"), L("Q")}, DecisionKind::if_,
                            Condition::var("c"), ls);
    CHECK(is_msc(d));
    CHECK(is_complete(d));
    CHECK(d.event_count() == 5);
    auto e = erase(d);
    CHECK(e.word(L("O")).size() == 1);
    CHECK(e.word(L("O"))[0].key() == "ifT(c)@O");
    CHECK(e.word(L("P")).empty());
    CHECK(e.word(L("Q")).empty());
    CHECK(erase(e) == e);
}

TEST_CASE("erasure preserves MSC-ness and completeness") {
    std::mt19937_64 rng(29);
    std::set<Lifeline> ls{L("O"), L("P")};
    for (int i = 0; i < 500; ++i) {
        MscTuple m(ls);
        std::uniform_int_distribution<int> pickd(0, 3);
        int n = pickd(rng) + 1;
        for (int k = 0; k < n; ++k) {
            switch (pickd(rng)) {
            case 0:
                m = concat(m, decision_block(L("O"), k % 2, ControlTag("0." + std::to_string(k)),
                                             {L("P")}, DecisionKind::while_, Condition::var("c"), ls));
                break;
            case 1: m = concat(m, msc_message(ls, L("P"), {var("x")}, L("O"), {var("x")})); break;
            case 2: m = concat(m, msc_action(ls, L("O"), {var("y")}, "f", {})); break;
            default: m.append(Letter::send(L("O"), {boolean(true), str("t")}, L("P"), ControlTag("9"))); break;
            }
        }
        auto e = erase(m);
        CHECK(erase(e) == e);
        if (is_msc(m)) {
            CHECK(is_msc(e));
            if (is_complete(m)) CHECK(is_complete(e));
        }
    }
}

TEST_CASE("prefix order") {
    std::mt19937_64 rng(31);
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    CHECK(is_prefix(MscTuple(AB), m));
    CHECK(is_prefix(m, m));
    MscTuple half(AB);
    half.append(Letter::send(L("A"), {var("x")}, L("B")));
    CHECK(is_prefix(half, m));
    CHECK_FALSE(is_prefix(m, half));
    CHECK_THROWS_AS(is_prefix(m, MscTuple({L("A")})), Error);

    std::vector<MscTuple> pool;
    for (int i = 0; i < 40; ++i) {
        auto t = random_tuple(rng, 4);
        pool.push_back(t);
        pool.push_back(concat(t, random_tuple(rng, 2)));
    }
    for (const auto& a : pool)
        for (const auto& b : pool) {
            if (is_prefix(a, b) && is_prefix(b, a)) CHECK(a == b);
            for (const auto& c : pool)
                if (is_prefix(a, b) && is_prefix(b, c)) CHECK(is_prefix(a, c));
        }
}

TEST_CASE("json round trip") {
    std::set<Lifeline> ls{L("O"), L("P"), L("Q")};
    auto d = decision_block(L("O"), false, ControlTag("0.1.0"), {L("P"), L("Q")}, DecisionKind::while_,
                            Condition::binary(Condition::Op::lt, Condition::var("n"),
                                              Condition::literal(Value::integer(3))),
                            ls);
    d = concat(d, msc_action(ls, L("P"), {var("a"), var("b")}, "g", {str("q"), Atom::constant(Value::integer(2))}));
    d = concat(d, msc_message(ls, L("Q"), {var("x"), boolean(true)}, L("O"), {var("y"), boolean(true)}));
    auto j = d.to_json();
    auto back = MscTuple::from_json(j);
    CHECK(back == d);
    CHECK(back.key() == d.key());
    CHECK(MscTuple::from_json(nlohmann::json::parse(j.dump())) == d);
}

TEST_CASE("msc sets") {
    MscSet s;
    auto m = msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")});
    CHECK(s.insert(m));
    CHECK_FALSE(s.insert(msc_message(AB, L("A"), {var("x")}, L("B"), {var("y")})));
    CHECK(s.size() == 1);
    CHECK(s.contains(m));
    CHECK_FALSE(s.contains(MscTuple(AB)));
}
