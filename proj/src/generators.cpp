#include "mscflow/generators.hpp"

#include <algorithm>
#include <iterator>

#include "mscflow/error.hpp"

namespace mscflow {

namespace {

std::size_t below(Rng& rng, std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool coin(Rng& rng, double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

const char* var_for(ValueType t) {
    switch (t) {
    case ValueType::string: return "s";
    case ValueType::integer: return "n";
    case ValueType::boolean: return "b";
    }
    return "s";
}

Value random_const(Rng& rng, ValueType t) {
    switch (t) {
    case ValueType::string: return Value::string(coin(rng) ? "a" : "bb");
    case ValueType::integer: return Value::integer(static_cast<std::int64_t>(below(rng, 3)));
    case ValueType::boolean: return Value::boolean(coin(rng));
    }
    return Value::boolean(true);
}

ValueType random_type(Rng& rng) {
    static const ValueType ts[] = {ValueType::string, ValueType::integer, ValueType::boolean};
    return ts[below(rng, 3)];
}

TypedName tn(std::string n, ValueType t) { return TypedName{std::move(n), t}; }

ActionDecl pure(std::string name, std::vector<TypedName> in, std::vector<TypedName> out) {
    ActionDecl a;
    a.name = std::move(name);
    a.kind = ActionKind::pure;
    a.inputs = std::move(in);
    a.outputs = std::move(out);
    return a;
}

class WorkflowGen {
public:
    WorkflowGen(Rng& rng, const GeneratorConfig& cfg) : rng_(rng), cfg_(cfg) {
        for (std::size_t i = 0; i < std::max<std::size_t>(cfg.lifelines, 1); ++i)
            ls_.emplace_back("L" + std::to_string(i));
    }

    RandomCase build() {
        RandomCase rc;
        rc.actions = generator_actions();
        auto& d = rc.decl;
        d.name = "generated";
        d.body = block(cfg_.budget, cfg_.depth);
        for (const auto& l : ls_) {
            d.vars.push_back({"s", ValueType::string, l, Value::string("a"), {}});
            d.vars.push_back({"n", ValueType::integer, l, Value::integer(0), {}});
            d.vars.push_back({"b", ValueType::boolean, l, Value::boolean(true), {}});
        }
        for (const auto& [name, owner] : counters_)
            d.vars.push_back({name, ValueType::integer, owner, Value::integer(0), {}});
        d.return_type = ValueType::string;
        d.return_var = "s";
        d.return_at = ls_.front();
        d = assign_control_tags(d);
        return rc;
    }

private:
    Lifeline any() { return ls_[below(rng_, ls_.size())]; }

    Atom source_atom(ValueType t) {
        if (coin(rng_, 0.3)) return Atom::constant(random_const(rng_, t));
        return Atom::var(var_for(t));
    }

    GlobalWorkflow block(std::size_t budget, std::size_t depth) {
        std::vector<GlobalWorkflow> items;
        while (budget > 0) {
            std::size_t used = 1;
            items.push_back(statement(budget, depth, used));
            budget -= std::min(budget, used);
        }
        return gw::seq(std::move(items));
    }

    GlobalWorkflow statement(std::size_t budget, std::size_t depth, std::size_t& used) {
        std::vector<int> kinds{0, 1, 1};
        if (ls_.size() > 1) kinds.insert(kinds.end(), {2, 2, 2});
        if (depth > 0 && budget >= 3) {
            if (cfg_.use_if) kinds.insert(kinds.end(), {3, 3});
            if (cfg_.use_while) kinds.push_back(4);
        }
        switch (kinds[below(rng_, kinds.size())]) {
        case 0: return gw::epsilon();
        case 1: return action(any());
        case 2: return message();
        case 3: {
            std::size_t inner = budget - 1;
            std::size_t a = 1 + below(rng_, std::max<std::size_t>(inner / 2, 1));
            std::size_t b = coin(rng_, 0.3) ? 0 : below(rng_, std::max<std::size_t>(inner - a, 1));
            used = 1 + a + b;
            auto owner = any();
            return gw::if_(condition(), owner, block(a, depth - 1), block(b, depth - 1));
        }
        default: {
            std::size_t inner = budget - 1;
            std::size_t a = 1 + below(rng_, std::max<std::size_t>(inner / 2, 1));
            std::size_t b = below(rng_, 2);
            used = 1 + a + b;
            auto owner = any();
            std::string c = "c" + std::to_string(counters_.size());
            counters_.emplace_back(c, owner);
            auto cond = Condition::binary(Condition::Op::lt, Condition::var(c),
                                          Condition::literal(Value::integer(cfg_.loop_limit)));
            auto tick = gw::act(owner, {Atom::var(c)}, "g_inc", {Atom::var(c)});
            return gw::while_(cond, owner, gw::seq(tick, block(a, depth - 1)),
                              block(b, depth - 1));
        }
        }
    }

    GlobalWorkflow message() {
        auto from = any();
        auto to = any();
        while (to == from) to = any();
        std::vector<ValueType> ts{ValueType::string, ValueType::integer, ValueType::boolean};
        std::shuffle(ts.begin(), ts.end(), rng_);
        ts.resize(below(rng_, 3));
        Payload x, y;
        for (auto t : ts) {
            auto a = source_atom(t);
            x.push_back(a);
            if (a.is_const() && coin(rng_, 0.5)) y.push_back(a);
            else y.push_back(Atom::var(var_for(t)));
        }
        return gw::msg(from, x, to, y);
    }

    GlobalWorkflow action(const Lifeline& at) {
        switch (below(rng_, 5)) {
        case 0: return gw::act(at, {Atom::var("n")}, "g_inc", {source_atom(ValueType::integer)});
        case 1: return gw::act(at, {Atom::var("b")}, "g_not", {source_atom(ValueType::boolean)});
        case 2:
            return gw::act(at, {Atom::var("s")}, "g_cat",
                           {source_atom(ValueType::string), source_atom(ValueType::integer)});
        case 3: return gw::act(at, {Atom::var("n")}, "g_len", {source_atom(ValueType::string)});
        default:
            return gw::act(at, {Atom::var("s"), Atom::var("b")}, "g_pair",
                           {source_atom(ValueType::string)});
        }
    }

    Condition condition() {
        using Op = Condition::Op;
        switch (below(rng_, 5)) {
        case 0: return Condition::var("b");
        case 1: return Condition::negate(Condition::var("b"));
        case 2:
            return Condition::binary(Op::lt, Condition::var("n"),
                                     Condition::literal(Value::integer(2)));
        case 3:
            return Condition::binary(Op::eq, Condition::var("s"),
                                     Condition::literal(Value::string("a")));
        default:
            return Condition::binary(
                Op::conj, Condition::var("b"),
                Condition::binary(Op::le, Condition::var("n"),
                                  Condition::literal(Value::integer(1))));
        }
    }

    Rng& rng_;
    GeneratorConfig cfg_;
    std::vector<Lifeline> ls_;
    std::vector<std::pair<std::string, Lifeline>> counters_;
};

class LocalGen {
public:
    LocalGen(Rng& rng, std::vector<Lifeline> peers) : rng_(rng), peers_(std::move(peers)) {}

    LocalProgram block(std::size_t budget, std::size_t depth) {
        std::vector<LocalProgram> items;
        while (budget > 0) {
            std::size_t used = 1;
            items.push_back(statement(budget, depth, used));
            budget -= std::min(budget, used);
        }
        return lp::seq(std::move(items));
    }

private:
    Payload payload() {
        Payload p;
        std::size_t n = below(rng_, 3);
        for (std::size_t i = 0; i < n; ++i)
            p.push_back(coin(rng_) ? Atom::var(coin(rng_) ? "x" : "y")
                                   : Atom::constant(random_const(rng_, random_type(rng_))));
        return p;
    }

    Lifeline peer() { return peers_[below(rng_, peers_.size())]; }

    ControlTag fresh() { return ControlTag("g" + std::to_string(tags_++)); }

    LocalProgram statement(std::size_t budget, std::size_t depth, std::size_t& used) {
        std::size_t kinds = (depth > 0 && budget >= 3) ? 8 : 4;
        if (peers_.empty()) kinds = (depth > 0 && budget >= 3) ? 8 : 2;
        std::size_t k = below(rng_, kinds);
        if (peers_.empty() && (k == 2 || k == 3 || k == 5 || k == 7)) k = 1;
        auto split = [&](std::size_t& a, std::size_t& b) {
            std::size_t inner = budget - 1;
            a = 1 + below(rng_, std::max<std::size_t>(inner / 2, 1));
            b = below(rng_, std::max<std::size_t>(inner - a, 1));
            used = 1 + a + b;
        };
        std::size_t a = 0, b = 0;
        switch (k) {
        case 0: return lp::epsilon();
        case 1: return lp::act({Atom::var("x")}, coin(rng_) ? "f" : "g", payload());
        case 2: return lp::send(payload(), peer());
        case 3: return lp::recv(payload(), peer());
        case 4: {
            split(a, b);
            auto cond = Condition::var("x");
            return lp::if_owned(cond, block(a, depth - 1), block(b, depth - 1), fresh());
        }
        case 5: {
            split(a, b);
            auto tag = fresh();
            return lp::if_recv(peer(), tag, "__ctrl_" + tag.str(), block(a, depth - 1),
                               block(b, depth - 1));
        }
        case 6: {
            split(a, b);
            return lp::while_owned(Condition::var("x"), block(a, depth - 1), block(b, depth - 1),
                                   fresh());
        }
        default: {
            split(a, b);
            auto tag = fresh();
            return lp::while_recv(peer(), tag, "__ctrl_" + tag.str(), block(a, depth - 1),
                                  block(b, depth - 1));
        }
        }
    }

    Rng& rng_;
    std::vector<Lifeline> peers_;
    std::size_t tags_ = 0;
};

} // namespace

std::vector<ActionDecl> generator_actions() {
    using VT = ValueType;
    return {
        pure("g_inc", {tn("x", VT::integer)}, {tn("y", VT::integer)}),
        pure("g_not", {tn("x", VT::boolean)}, {tn("y", VT::boolean)}),
        pure("g_cat", {tn("x", VT::string), tn("k", VT::integer)}, {tn("y", VT::string)}),
        pure("g_len", {tn("x", VT::string)}, {tn("k", VT::integer)}),
        pure("g_pair", {tn("x", VT::string)}, {tn("y", VT::string), tn("even", VT::boolean)}),
    };
}

PureRegistry generator_pure_registry() {
    auto r = PureRegistry::builtins();
    r.add("g_inc", 1, [](const std::vector<Value>& v) {
        return std::vector<Value>{Value::integer(v[0].as_integer() + 1)};
    });
    r.add("g_not", 1, [](const std::vector<Value>& v) {
        return std::vector<Value>{Value::boolean(!v[0].as_boolean())};
    });
    r.add("g_cat", 2, [](const std::vector<Value>& v) {
        return std::vector<Value>{
            Value::string(v[0].as_string() + std::to_string(v[1].as_integer()))};
    });
    r.add("g_len", 1, [](const std::vector<Value>& v) {
        return std::vector<Value>{
            Value::integer(static_cast<std::int64_t>(v[0].as_string().size()))};
    });
    r.add("g_pair", 1, [](const std::vector<Value>& v) {
        return std::vector<Value>{v[0], Value::boolean(v[0].as_string().size() % 2 == 0)};
    });
    return r;
}

RandomCase random_workflow(Rng& rng, const GeneratorConfig& cfg) {
    return WorkflowGen(rng, cfg).build();
}

LocalProgram random_local_program(Rng& rng, const std::vector<Lifeline>& peers,
                                  std::size_t budget, std::size_t depth) {
    return LocalGen(rng, peers).block(budget, depth);
}

MscTuple random_prefix_tuple(Rng& rng, const DistributedProgram& d, const Bound& bound) {
    std::set<Lifeline> ls;
    for (const auto& [l, _] : d) ls.insert(l);
    MscTuple m(ls);
    for (const auto& [l, s] : d) {
        auto words = local_prefixes(l, s, bound).to_vector();
        if (!words.empty()) m.word(l) = words[below(rng, words.size())];
    }
    return m;
}

const MscTuple& pick(Rng& rng, const MscSet& s) {
    if (s.empty()) throw Error(Errc::contract, "pick from an empty set");
    auto it = s.begin();
    std::advance(it, static_cast<std::ptrdiff_t>(below(rng, s.size())));
    return it->second;
}

} // namespace mscflow
