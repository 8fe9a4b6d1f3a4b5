#include "mscflow/verify.hpp"

#include <algorithm>
#include <functional>

#include "mscflow/error.hpp"
#include "mscflow/projection.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

VerificationReport make(std::string check, std::optional<std::size_t> bound = std::nullopt) {
    VerificationReport r;
    r.check = std::move(check);
    r.bound = bound;
    return r;
}

VerificationReport fail(VerificationReport r, std::string detail) {
    r.verdict = Verdict::fail;
    r.detail = std::move(detail);
    return r;
}

// Runs `body`, turning a resource cap hit into a resource_exceeded verdict.
VerificationReport guarded(VerificationReport base,
                           const std::function<VerificationReport(VerificationReport)>& body) {
    try {
        return body(base);
    } catch (const Error& e) {
        if (e.code() != Errc::resource_exceeded) throw;
        base.verdict = Verdict::resource_exceeded;
        base.detail = e.what();
        return base;
    }
}

std::set<Lifeline> universe_of(const VerifyTarget& t) {
    std::set<Lifeline> ls = t.lifelines;
    if (ls.empty()) ls = participation_set(t.workflow);
    for (const auto& [l, _] : t.program) ls.insert(l);
    return ls;
}

// Decision constructs of the global workflow in pre-order.
struct GlobalConstruct {
    ControlTag tag;
    Lifeline owner;
    DecisionKind kind;
    GlobalWorkflow first;  // then / body
    GlobalWorkflow second; // else / exit
    Condition cond;
};

void global_constructs(const GlobalWorkflow& p, std::vector<GlobalConstruct>& out) {
    std::visit(overloaded{
                   [&](const gw::Seq& s) {
                       global_constructs(s.first, out);
                       global_constructs(s.second, out);
                   },
                   [&](const gw::If& i) {
                       out.push_back({i.tag, i.owner, DecisionKind::if_, i.then_branch,
                                      i.else_branch, i.cond});
                       global_constructs(i.then_branch, out);
                       global_constructs(i.else_branch, out);
                   },
                   [&](const gw::While& w) {
                       out.push_back({w.tag, w.owner, DecisionKind::while_, w.body, w.exit, w.cond});
                       global_constructs(w.body, out);
                       global_constructs(w.exit, out);
                   },
                   [](const auto&) {},
               },
               p.node().v);
}

struct OwnedSite {
    Lifeline at;
    ControlTag tag;
    DecisionKind kind;
    LocalProgram first;
    LocalProgram second;
};

struct RecvSite {
    Lifeline at;
    Lifeline from;
    ControlTag tag;
    DecisionKind kind;
};

void local_sites(const Lifeline& at, const LocalProgram& s, std::vector<OwnedSite>& owned,
                 std::vector<RecvSite>& recvs) {
    std::visit(overloaded{
                   [&](const lp::Seq& x) {
                       local_sites(at, x.first, owned, recvs);
                       local_sites(at, x.second, owned, recvs);
                   },
                   [&](const lp::IfOwned& x) {
                       owned.push_back({at, x.tag, DecisionKind::if_, x.then_branch,
                                        x.else_branch});
                       local_sites(at, x.then_branch, owned, recvs);
                       local_sites(at, x.else_branch, owned, recvs);
                   },
                   [&](const lp::WhileOwned& x) {
                       owned.push_back({at, x.tag, DecisionKind::while_, x.body, x.exit});
                       local_sites(at, x.body, owned, recvs);
                       local_sites(at, x.exit, owned, recvs);
                   },
                   [&](const lp::IfRecv& x) {
                       recvs.push_back({at, x.from, x.tag, DecisionKind::if_});
                       local_sites(at, x.then_branch, owned, recvs);
                       local_sites(at, x.else_branch, owned, recvs);
                   },
                   [&](const lp::WhileRecv& x) {
                       recvs.push_back({at, x.from, x.tag, DecisionKind::while_});
                       local_sites(at, x.body, owned, recvs);
                       local_sites(at, x.exit, owned, recvs);
                   },
                   [](const auto&) {},
               },
               s.node().v);
}

void flatten(const LocalProgram& s, std::vector<LocalProgram>& out) {
    if (auto q = s.as<lp::Seq>()) {
        flatten(q->first, out);
        flatten(q->second, out);
    } else if (!s.is_epsilon()) {
        out.push_back(s);
    }
}

// Control sends at the head of a branch.
std::vector<lp::Send> leading_control_sends(const LocalProgram& s) {
    std::vector<LocalProgram> items;
    flatten(s, items);
    std::vector<lp::Send> out;
    for (const auto& it : items) {
        auto snd = it.as<lp::Send>();
        if (!snd || !snd->control) break;
        out.push_back(*snd);
    }
    return out;
}

std::string kind_name(DecisionKind k) { return k == DecisionKind::if_ ? "if" : "while"; }

std::string check_branch_sends(const LocalProgram& branch, const std::vector<Lifeline>& r,
                               bool value, const ControlTag& tag) {
    auto sends = leading_control_sends(branch);
    std::string which = value ? "true" : "false";
    if (sends.size() < r.size())
        return "owner " + which + " branch sends " + std::to_string(sends.size()) +
               " control messages, expected " + std::to_string(r.size());
    for (std::size_t i = 0; i < r.size(); ++i) {
        const auto& s = sends[i];
        if (s.to != r[i])
            return "owner " + which + " branch sends control message " + std::to_string(i + 1) +
                   " to " + s.to.name() + ", expected " + r[i].name();
        if (*s.control != tag)
            return "owner " + which + " branch control message to " + s.to.name() +
                   " carries tag " + s.control->str();
        if (s.payload.size() != 1 || !s.payload[0].is_const() ||
            s.payload[0].value() != Value::boolean(value))
            return "owner " + which + " branch control message to " + s.to.name() +
                   " does not carry " + which;
    }
    // Further control sends with this tag are extra broadcasts.
    for (std::size_t i = r.size(); i < sends.size(); ++i)
        if (*sends[i].control == tag)
            return "owner " + which + " branch sends an extra control message to " +
                   sends[i].to.name();
    return {};
}

} // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::resource_exceeded: return "resource_exceeded";
    }
    return "?";
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json j{{"check", check}, {"verdict", std::string(to_string(verdict))}};
    if (bound) j["bound"] = *bound;
    if (!detail.empty()) j["detail"] = detail;
    if (witness) j["witness"] = witness->to_json();
    if (word_witness) {
        auto w = [](const LocalWord& x) {
            auto a = nlohmann::json::array();
            for (const auto& l : x) a.push_back(l.key());
            return a;
        };
        j["witness_words"] = {w(word_witness->first), w(word_witness->second)};
    }
    return j;
}

VerifyTarget VerifyTarget::of(const WorkflowDecl& decl) {
    return of(assign_control_tags(decl.body), decl.lifelines());
}

VerifyTarget VerifyTarget::of(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines) {
    VerifyTarget t;
    t.workflow = p;
    t.lifelines = lifelines.empty() ? participation_set(p) : lifelines;
    t.program = project_all(p, t.lifelines);
    return t;
}

VerificationReport check_theorem_correctness(const VerifyTarget& t, const Bound& bound) {
    return guarded(make("theorem", bound.unroll), [&](VerificationReport r) {
        auto ls = universe_of(t);
        auto g = global_semantics(t.workflow, bound, ls);
        auto d = distributed_semantics(t.program, bound);
        MscSet e;
        for (const auto& [_, m] : d) e.insert(erase(m));
        for (const auto& [_, m] : e) {
            if (!g.contains(m)) {
                r.witness = m;
                return fail(r, "erased distributed trace not in the global semantics (" +
                                   std::to_string(e.size()) + " erased vs " +
                                   std::to_string(g.size()) + " global)");
            }
        }
        for (const auto& [_, m] : g) {
            if (!e.contains(m)) {
                r.witness = m;
                return fail(r, "global trace not produced by the distributed program (" +
                                   std::to_string(e.size()) + " erased vs " +
                                   std::to_string(g.size()) + " global)");
            }
        }
        r.detail = std::to_string(g.size()) + " traces agree";
        return r;
    });
}

VerificationReport check_theorem_correctness(const GlobalWorkflow& p, const Bound& bound) {
    return check_theorem_correctness(VerifyTarget::of(p), bound);
}

std::optional<MscTuple> find_extension(const MscTuple& m, const MscSet& complete) {
    for (const auto& [_, c] : complete)
        if (c.lifelines() == m.lifelines() && is_prefix(m, c)) return c;
    return std::nullopt;
}

VerificationReport check_deadlock_freedom(const DistributedProgram& d, const Bound& bound) {
    return guarded(make("deadlock", bound.unroll), [&](VerificationReport r) {
        auto prefixes = distributed_prefix_semantics(d, bound);
        auto complete = distributed_semantics(d, bound);
        std::size_t stuck = 0;
        for (const auto& [_, m] : prefixes) {
            if (find_extension(m, complete)) continue;
            if (!stuck) r.witness = m;
            ++stuck;
        }
        if (stuck)
            return fail(r, std::to_string(stuck) + " of " + std::to_string(prefixes.size()) +
                               " prefixes have no complete extension");
        r.detail = std::to_string(prefixes.size()) + " prefixes extend";
        return r;
    });
}

VerificationReport check_deadlock_freedom(const GlobalWorkflow& p, const Bound& bound) {
    return check_deadlock_freedom(project_all(p), bound);
}

VerificationReport check_prefix_freeness(const Lifeline& at, const LocalProgram& s,
                                         const Bound& bound) {
    return guarded(make("prefix-free " + at.name(), bound.unroll), [&](VerificationReport r) {
        auto traces = local_traces(at, s, bound).to_vector();
        for (const auto& u : traces) {
            for (const auto& v : traces) {
                if (u.size() < v.size() && is_word_prefix(u, v)) {
                    r.word_witness = std::make_pair(u, v);
                    return fail(r, "trace is a proper prefix of another trace");
                }
            }
        }
        r.detail = std::to_string(traces.size()) + " traces";
        return r;
    });
}

VerificationReport check_erasure_lemma(const MscTuple& m) {
    auto r = make("erasure");
    if (!is_msc(m)) {
        r.detail = "not an MSC";
        return r;
    }
    auto e = erase(m);
    r.witness = m;
    auto chk = is_msc(e);
    if (!chk) return fail(r, "erasure is not an MSC: " + chk.violation->message);
    if (is_complete(m) && !is_complete(e)) return fail(r, "erasure lost completeness");
    r.witness.reset();
    return r;
}

VerificationReport check_concat_lemmas(const MscTuple& m1, const MscTuple& m2) {
    auto r = make("concat");
    auto c = concat(m1, m2);
    bool m1_msc = static_cast<bool>(is_msc(m1));
    bool m1_done = m1_msc && is_complete(m1);
    if (!m1_done) {
        r.detail = "left operand not a complete MSC";
        return r;
    }
    r.witness = c;
    bool m2_msc = static_cast<bool>(is_msc(m2));
    bool c_msc = static_cast<bool>(is_msc(c));
    if (m2_msc) {
        if (!c_msc) return fail(r, "concatenation of MSCs is not an MSC");
        if (is_complete(m2) != is_complete(c))
            return fail(r, "concatenation completeness differs from the right operand");
    }
    if (c_msc) {
        if (!m2_msc) return fail(r, "concatenation is an MSC but the right operand is not");
        if (is_complete(c) && !is_complete(m2))
            return fail(r, "complete concatenation with an incomplete right operand");
    }
    r.witness.reset();
    return r;
}

VerificationReport check_factorization(const Lifeline& at, const LocalProgram& s1,
                                       const LocalProgram& s2, const Bound& bound) {
    return guarded(make("factorization", bound.unroll), [&](VerificationReport r) {
        auto whole = local_prefixes(at, lp::seq(s1, s2), bound);
        auto p1 = local_prefixes(at, s1, bound);
        auto t1 = local_traces(at, s1, bound);
        auto p2 = local_prefixes(at, s2, bound);
        for (const auto& [_, w] : whole) {
            bool found = false;
            for (std::size_t i = 0; i <= w.size() && !found; ++i) {
                LocalWord u(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(i));
                LocalWord v(w.begin() + static_cast<std::ptrdiff_t>(i), w.end());
                if (!p1.contains(u) || !p2.contains(v)) continue;
                if (!v.empty() && !t1.contains(u)) continue;
                found = true;
            }
            if (!found) {
                r.word_witness = std::make_pair(w, LocalWord{});
                return fail(r, "prefix has no factorization: " + word_to_string(w));
            }
        }
        r.detail = std::to_string(whole.size()) + " prefixes factor";
        return r;
    });
}

VerificationReport check_decision_structure(const VerifyTarget& t) {
    auto r = make("decision-structure");
    std::vector<GlobalConstruct> gcs;
    global_constructs(t.workflow, gcs);
    std::vector<OwnedSite> owned;
    std::vector<RecvSite> recvs;
    for (const auto& [l, s] : t.program) local_sites(l, s, owned, recvs);

    auto ls = universe_of(t);
    // The witness of a failure is the decision block the program should
    // implement, or the stray letter when no construct matches.
    auto expected = [&](const GlobalConstruct& g) {
        auto rs = recipient_set(g.owner, g.first, g.second);
        return decision_block(g.owner, true, g.tag, {rs.begin(), rs.end()}, g.kind, g.cond, ls);
    };
    auto stray = [&](const Letter& l) {
        MscTuple m(ls);
        m.append(l);
        return m;
    };

    std::set<ControlTag> tags;
    for (const auto& g : gcs) {
        if (g.tag.empty() || !tags.insert(g.tag).second) {
            r.witness = expected(g);
            return fail(r, g.tag.empty() ? "untagged " + kind_name(g.kind) + " construct"
                                         : "tag " + g.tag.str() + " used by two workflow constructs");
        }
    }
    Payload top{Atom::constant(Value::boolean(true))};
    for (const auto& o : owned) {
        if (tags.count(o.tag)) continue;
        auto ck = o.kind == DecisionKind::if_ ? ChoiceKind::if_true : ChoiceKind::while_true;
        r.witness = stray(Letter::choice(ck, Condition(), o.at));
        return fail(r, o.at.name() + " owns a construct with unknown tag " + o.tag.str());
    }
    for (const auto& x : recvs) {
        if (tags.count(x.tag)) continue;
        r.witness = stray(Letter::recv(x.at, top, x.from, x.tag));
        return fail(r, x.at.name() + " receives a decision with unknown tag " + x.tag.str());
    }

    for (const auto& g : gcs) {
        std::string where = kind_name(g.kind) + " " + g.tag.str() + "@" + g.owner.name() + ": ";
        auto rs = recipient_set(g.owner, g.first, g.second);
        r.witness = expected(g);
        std::vector<const OwnedSite*> mine;
        for (const auto& o : owned)
            if (o.tag == g.tag) mine.push_back(&o);
        if (mine.size() != 1)
            return fail(r, where + std::to_string(mine.size()) + " owned constructs carry the tag");
        const auto& o = *mine.front();
        if (o.at != g.owner) return fail(r, where + "decided by " + o.at.name());
        if (o.kind != g.kind) return fail(r, where + "owner construct has the wrong kind");
        if (auto e = check_branch_sends(o.first, rs, true, g.tag); !e.empty())
            return fail(r, where + e);
        if (auto e = check_branch_sends(o.second, rs, false, g.tag); !e.empty())
            return fail(r, where + e);

        std::map<Lifeline, std::size_t> seen;
        for (const auto& x : recvs) {
            if (x.tag != g.tag) continue;
            if (std::find(rs.begin(), rs.end(), x.at) == rs.end())
                return fail(r, where + x.at.name() + " receives the decision but is no recipient");
            if (x.from != g.owner)
                return fail(r, where + x.at.name() + " receives the decision from " +
                                   x.from.name());
            if (x.kind != g.kind)
                return fail(r, where + x.at.name() + " receive construct has the wrong kind");
            ++seen[x.at];
        }
        for (const auto& c : rs) {
            if (seen[c] != 1)
                return fail(r, where + c.name() + " has " + std::to_string(seen[c]) +
                                   " receive constructs for the decision");
        }
    }
    r.witness.reset();
    r.detail = std::to_string(gcs.size()) + " decisions";
    return r;
}

VerificationReport check_size_bound(const GlobalWorkflow& p, const std::set<Lifeline>& lifelines) {
    auto r = make("size-bound");
    auto ls = lifelines.empty() ? participation_set(p) : lifelines;
    std::size_t n = ls.size();
    std::size_t size = workflow_size(p);
    std::size_t total = node_count(project_all(p, ls));
    std::size_t limit = n * size + 2 * (n ? n - 1 : 0) * size;
    r.detail = std::to_string(total) + " nodes, limit " + std::to_string(limit) + " (n=" +
               std::to_string(n) + ", |P|=" + std::to_string(size) + ")";
    if (total > limit) r.verdict = Verdict::fail;
    return r;
}

std::vector<VerificationReport> verify_all(const VerifyTarget& t, const Bound& bound) {
    std::vector<VerificationReport> out;
    out.push_back(check_theorem_correctness(t, bound));
    out.push_back(check_deadlock_freedom(t.program, bound));
    for (const auto& [l, s] : t.program) out.push_back(check_prefix_freeness(l, s, bound));
    out.push_back(check_decision_structure(t));
    out.push_back(check_size_bound(t.workflow, universe_of(t)));
    return out;
}

MscTuple symbolic_trace_of(const std::vector<TraceEvent>& log,
                           const std::set<Lifeline>& universe) {
    MscTuple m(universe);
    for (const auto& e : log) m.append(e.letter);
    return m;
}

std::string_view to_string(Mutation m) noexcept {
    switch (m) {
    case Mutation::drop_broadcast: return "drop-broadcast";
    case Mutation::reorder_broadcasts: return "reorder-broadcasts";
    case Mutation::reuse_tag: return "reuse-tag";
    case Mutation::swap_recipient_branches: return "swap-recipient-branches";
    case Mutation::omit_recipient: return "omit-recipient";
    }
    return "?";
}

namespace {

using Rewrite = std::function<std::optional<LocalProgram>(const LocalProgram&)>;

// Rebuilds `s`, replacing the first nodes (top-down) for which `f` answers.
LocalProgram rewrite(const LocalProgram& s, const Rewrite& f) {
    if (auto x = f(s)) return *x;
    return std::visit(
        overloaded{
            [&](const lp::Seq& x) { return lp::seq(rewrite(x.first, f), rewrite(x.second, f)); },
            [&](const lp::IfOwned& x) {
                return lp::if_owned(x.cond, rewrite(x.then_branch, f), rewrite(x.else_branch, f),
                                    x.tag);
            },
            [&](const lp::WhileOwned& x) {
                return lp::while_owned(x.cond, rewrite(x.body, f), rewrite(x.exit, f), x.tag);
            },
            [&](const lp::IfRecv& x) {
                return lp::if_recv(x.from, x.tag, x.bound_var, rewrite(x.then_branch, f),
                                   rewrite(x.else_branch, f));
            },
            [&](const lp::WhileRecv& x) {
                return lp::while_recv(x.from, x.tag, x.bound_var, rewrite(x.body, f),
                                      rewrite(x.exit, f));
            },
            [&](const auto&) { return s; },
        },
        s.node().v);
}

// Splits a branch into its leading control sends and the remainder.
std::pair<std::vector<LocalProgram>, LocalProgram> split_sends(LocalProgram s) {
    std::vector<LocalProgram> sends;
    while (auto q = s.as<lp::Seq>()) {
        auto snd = q->first.as<lp::Send>();
        if (!snd || !snd->control) break;
        sends.push_back(q->first);
        s = q->second;
    }
    return {sends, s};
}

LocalProgram join_sends(const std::vector<LocalProgram>& sends, LocalProgram rest) {
    for (auto it = sends.rbegin(); it != sends.rend(); ++it) rest = lp::seq(*it, rest);
    return rest;
}

LocalProgram without_send_to(const LocalProgram& branch, const Lifeline& to) {
    auto [sends, rest] = split_sends(branch);
    std::vector<LocalProgram> kept;
    for (const auto& s : sends)
        if (s.as<lp::Send>()->to != to) kept.push_back(s);
    return join_sends(kept, rest);
}

LocalProgram reversed_sends(const LocalProgram& branch) {
    auto [sends, rest] = split_sends(branch);
    std::reverse(sends.begin(), sends.end());
    return join_sends(sends, rest);
}

// Applies `first`/`second` to the owner's branches of the construct tagged `tag`.
LocalProgram edit_owned(const LocalProgram& s, const ControlTag& tag,
                        const std::function<LocalProgram(const LocalProgram&)>& first,
                        const std::function<LocalProgram(const LocalProgram&)>& second) {
    return rewrite(s, [&](const LocalProgram& n) -> std::optional<LocalProgram> {
        if (auto x = n.as<lp::IfOwned>(); x && x->tag == tag)
            return lp::if_owned(x->cond, first(x->then_branch), second(x->else_branch), x->tag);
        if (auto x = n.as<lp::WhileOwned>(); x && x->tag == tag)
            return lp::while_owned(x->cond, first(x->body), second(x->exit), x->tag);
        return std::nullopt;
    });
}

LocalProgram identity(const LocalProgram& s) { return s; }

GlobalWorkflow retag(const GlobalWorkflow& p, const ControlTag& from, const ControlTag& to) {
    return std::visit(
        overloaded{
            [&](const gw::Seq& s) {
                return gw::seq(retag(s.first, from, to), retag(s.second, from, to), p.span());
            },
            [&](const gw::If& i) {
                return gw::if_(i.cond, i.owner, retag(i.then_branch, from, to),
                               retag(i.else_branch, from, to), i.tag == from ? to : i.tag,
                               p.span());
            },
            [&](const gw::While& w) {
                return gw::while_(w.cond, w.owner, retag(w.body, from, to),
                                  retag(w.exit, from, to), w.tag == from ? to : w.tag, p.span());
            },
            [&](const auto&) { return p; },
        },
        p.node().v);
}

bool nested_in(const ControlTag& inner, const ControlTag& outer) {
    return inner.str().rfind(outer.str() + ".", 0) == 0;
}

} // namespace

std::optional<DistributedProgram> mutate_projection(const GlobalWorkflow& p,
                                                    const std::set<Lifeline>& lifelines,
                                                    Mutation m) {
    auto ls = lifelines.empty() ? participation_set(p) : lifelines;
    std::vector<GlobalConstruct> gcs;
    global_constructs(p, gcs);

    if (m == Mutation::reuse_tag) {
        for (std::size_t i = 0; i < gcs.size(); ++i) {
            for (std::size_t j = i + 1; j < gcs.size(); ++j) {
                const auto& a = gcs[i].tag;
                const auto& b = gcs[j].tag;
                if (nested_in(a, b) || nested_in(b, a)) continue;
                return project_all(retag(p, b, a), ls);
            }
        }
        return std::nullopt;
    }

    auto d = project_all(p, ls);
    for (const auto& g : gcs) {
        auto rs = recipient_set(g.owner, g.first, g.second);
        if (rs.empty() || (m == Mutation::reorder_broadcasts && rs.size() < 2)) continue;
        auto& owner = d.at(g.owner);
        switch (m) {
        case Mutation::drop_broadcast: {
            auto to = rs.front();
            owner = edit_owned(
                owner, g.tag, [&](const LocalProgram& b) { return without_send_to(b, to); },
                identity);
            return d;
        }
        case Mutation::reorder_broadcasts:
            owner = edit_owned(owner, g.tag, reversed_sends, reversed_sends);
            return d;
        case Mutation::omit_recipient: {
            auto to = rs.front();
            auto drop = [&](const LocalProgram& b) { return without_send_to(b, to); };
            owner = edit_owned(owner, g.tag, drop, drop);
            d.at(to) = rewrite(d.at(to), [&](const LocalProgram& n) -> std::optional<LocalProgram> {
                if (auto x = n.as<lp::IfRecv>(); x && x->tag == g.tag) return lp::epsilon();
                if (auto x = n.as<lp::WhileRecv>(); x && x->tag == g.tag) return lp::epsilon();
                return std::nullopt;
            });
            return d;
        }
        case Mutation::swap_recipient_branches: {
            for (const auto& c : rs) {
                if (project(g.first, c) == project(g.second, c)) continue;
                d.at(c) = rewrite(d.at(c), [&](const LocalProgram& n) -> std::optional<LocalProgram> {
                    if (auto x = n.as<lp::IfRecv>(); x && x->tag == g.tag)
                        return lp::if_recv(x->from, x->tag, x->bound_var, x->else_branch,
                                           x->then_branch);
                    if (auto x = n.as<lp::WhileRecv>(); x && x->tag == g.tag)
                        return lp::while_recv(x->from, x->tag, x->bound_var, x->exit, x->body);
                    return std::nullopt;
                });
                return d;
            }
            break;
        }
        case Mutation::reuse_tag: break;
        }
    }
    return std::nullopt;
}

} // namespace mscflow
