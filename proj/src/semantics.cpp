#include "mscflow/semantics.hpp"

#include <algorithm>
#include <functional>

#include "mscflow/error.hpp"

namespace mscflow {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void guard(std::size_t n, const Bound& b, const char* what) {
    if (n > b.cap)
        throw Error(Errc::resource_exceeded, std::string(what) + ": more than " +
                                                 std::to_string(b.cap) + " elements");
}

using Tuples = std::vector<MscTuple>;

Tuples dedupe(Tuples in) {
    MscSet s;
    Tuples out;
    for (auto& m : in)
        if (s.insert(m)) out.push_back(std::move(m));
    return out;
}

Tuples product(const Tuples& a, const Tuples& b, const Bound& bound) {
    guard(a.size() * b.size(), bound, "global semantics");
    Tuples out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) out.push_back(concat(x, y));
    return dedupe(std::move(out));
}

Tuples prepend(const MscTuple& head, const Tuples& xs) {
    Tuples out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(concat(head, x));
    return out;
}

class GlobalEnum {
public:
    GlobalEnum(std::set<Lifeline> ls, const Bound& b) : ls_(std::move(ls)), b_(b) {}

    Tuples run(const GlobalWorkflow& p) {
        return std::visit(
            overloaded{
                [&](const gw::Epsilon&) { return Tuples{MscTuple(ls_)}; },
                [&](const gw::Msg& m) {
                    return Tuples{msc_message(ls_, m.from, m.send, m.to, m.recv)};
                },
                [&](const gw::Act& a) {
                    return Tuples{msc_action(ls_, a.at, a.outputs, a.action, a.inputs)};
                },
                [&](const gw::Seq& s) { return product(run(s.first), run(s.second), b_); },
                [&](const gw::If& i) {
                    auto t = prepend(msc_choice(ls_, ChoiceKind::if_true, i.cond, i.owner),
                                     run(i.then_branch));
                    auto e = prepend(msc_choice(ls_, ChoiceKind::if_false, i.cond, i.owner),
                                     run(i.else_branch));
                    t.insert(t.end(), e.begin(), e.end());
                    guard(t.size(), b_, "global semantics");
                    return dedupe(std::move(t));
                },
                [&](const gw::While& w) {
                    auto iter = prepend(msc_choice(ls_, ChoiceKind::while_true, w.cond, w.owner),
                                        run(w.body));
                    auto done = prepend(msc_choice(ls_, ChoiceKind::while_false, w.cond, w.owner),
                                        run(w.exit));
                    Tuples out;
                    Tuples heads{MscTuple(ls_)};
                    for (std::size_t k = 0;; ++k) {
                        auto finished = product(heads, done, b_);
                        out.insert(out.end(), finished.begin(), finished.end());
                        guard(out.size(), b_, "global semantics");
                        if (k == b_.unroll) break;
                        heads = product(heads, iter, b_);
                    }
                    return dedupe(std::move(out));
                },
            },
            p.node().v);
    }

private:
    std::set<Lifeline> ls_;
    Bound b_;
};

using Words = std::vector<LocalWord>;

Words word_dedupe(Words in) {
    WordSet s;
    Words out;
    for (auto& w : in)
        if (s.insert(w)) out.push_back(std::move(w));
    return out;
}

Words word_product(const Words& a, const Words& b, const Bound& bound) {
    guard(a.size() * b.size(), bound, "local traces");
    Words out;
    out.reserve(a.size() * b.size());
    for (const auto& x : a)
        for (const auto& y : b) {
            LocalWord w = x;
            w.insert(w.end(), y.begin(), y.end());
            out.push_back(std::move(w));
        }
    return word_dedupe(std::move(out));
}

Words word_prepend(const Letter& head, const Words& xs) {
    Words out;
    out.reserve(xs.size());
    for (const auto& x : xs) {
        LocalWord w{head};
        w.insert(w.end(), x.begin(), x.end());
        out.push_back(std::move(w));
    }
    return out;
}

Letter control_recv(const Lifeline& at, const Lifeline& from, const ControlTag& tag, bool v) {
    return Letter::recv(at, {Atom::constant(Value::boolean(v))}, from, tag);
}

class LocalEnum {
public:
    LocalEnum(Lifeline at, const Bound& b) : at_(std::move(at)), b_(b) {}

    Words run(const LocalProgram& s) {
        return std::visit(
            overloaded{
                [&](const lp::Epsilon&) { return Words{LocalWord{}}; },
                [&](const lp::Send& x) {
                    return Words{{Letter::send(at_, x.payload, x.to, x.control)}};
                },
                [&](const lp::Recv& x) {
                    return Words{{Letter::recv(at_, x.payload, x.from, x.control)}};
                },
                [&](const lp::Act& x) {
                    return Words{{Letter::action(at_, x.outputs, x.action, x.inputs)}};
                },
                [&](const lp::Seq& x) { return word_product(run(x.first), run(x.second), b_); },
                [&](const lp::IfOwned& x) {
                    return branch(Letter::choice(ChoiceKind::if_true, x.cond, at_),
                                  run(x.then_branch),
                                  Letter::choice(ChoiceKind::if_false, x.cond, at_),
                                  run(x.else_branch));
                },
                [&](const lp::IfRecv& x) {
                    return branch(control_recv(at_, x.from, x.tag, true), run(x.then_branch),
                                  control_recv(at_, x.from, x.tag, false), run(x.else_branch));
                },
                [&](const lp::WhileOwned& x) {
                    return loop(Letter::choice(ChoiceKind::while_true, x.cond, at_), run(x.body),
                                Letter::choice(ChoiceKind::while_false, x.cond, at_),
                                run(x.exit));
                },
                [&](const lp::WhileRecv& x) {
                    return loop(control_recv(at_, x.from, x.tag, true), run(x.body),
                                control_recv(at_, x.from, x.tag, false), run(x.exit));
                },
            },
            s.node().v);
    }

private:
    Words branch(const Letter& lt, const Words& t, const Letter& lf, const Words& f) {
        auto out = word_prepend(lt, t);
        auto e = word_prepend(lf, f);
        out.insert(out.end(), e.begin(), e.end());
        guard(out.size(), b_, "local traces");
        return word_dedupe(std::move(out));
    }

    Words loop(const Letter& lt, const Words& body, const Letter& lf, const Words& exit) {
        auto iter = word_prepend(lt, body);
        auto done = word_prepend(lf, exit);
        Words out;
        Words heads{LocalWord{}};
        for (std::size_t k = 0;; ++k) {
            auto finished = word_product(heads, done, b_);
            out.insert(out.end(), finished.begin(), finished.end());
            guard(out.size(), b_, "local traces");
            if (k == b_.unroll) break;
            heads = word_product(heads, iter, b_);
        }
        return word_dedupe(std::move(out));
    }

    Lifeline at_;
    Bound b_;
};

// Per-word channel summary: control tag plus payload of each send to / receive
// from a peer, in order.
struct WordInfo {
    const LocalWord* word;
    std::map<Lifeline, std::vector<const Letter*>> sends, recvs;
};

WordInfo summarize(const LocalWord& w) {
    WordInfo info{&w, {}, {}};
    for (const auto& x : w) {
        if (x.is_send()) info.sends[x.peer()].push_back(&x);
        else if (x.is_recv()) info.recvs[x.peer()].push_back(&x);
    }
    return info;
}

const std::vector<const Letter*>& get(const std::map<Lifeline, std::vector<const Letter*>>& m,
                                      const Lifeline& k) {
    static const std::vector<const Letter*> none;
    auto it = m.find(k);
    return it == m.end() ? none : it->second;
}

// Channel from -> to between two assigned words. Complete mode needs equal
// counts; prefix mode needs no more receives than sends.
bool channel_ok(const std::vector<const Letter*>& ss, const std::vector<const Letter*>& rs,
                bool complete) {
    if (complete ? ss.size() != rs.size() : rs.size() > ss.size()) return false;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (ss[i]->control() != rs[i]->control()) return false;
        if (!payload_matches(ss[i]->payload(), rs[i]->payload())) return false;
    }
    return true;
}

MscSet combine(const DistributedProgram& d, const Bound& bound, bool complete) {
    std::vector<Lifeline> order;
    std::vector<Words> words;
    for (const auto& [l, s] : d) {
        order.push_back(l);
        words.push_back(complete ? local_traces(l, s, bound).to_vector()
                                 : local_prefixes(l, s, bound).to_vector());
    }
    // Fewest candidates first.
    std::vector<std::size_t> idx(order.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::stable_sort(idx.begin(), idx.end(),
                     [&](auto a, auto b) { return words[a].size() < words[b].size(); });

    std::vector<std::vector<WordInfo>> infos(order.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        for (const auto& w : words[i]) infos[i].push_back(summarize(w));

    MscSet out;
    std::vector<const WordInfo*> chosen(order.size(), nullptr);
    std::function<void(std::size_t)> go = [&](std::size_t depth) {
        if (depth == idx.size()) {
            MscTuple m;
            for (std::size_t i = 0; i < order.size(); ++i) m.word(order[i]) = *chosen[i]->word;
            if (!is_msc(m)) return;
            if (complete && !all_sends_matched(m)) return;
            out.insert(std::move(m));
            guard(out.size(), bound, complete ? "distributed semantics"
                                              : "distributed prefix semantics");
            return;
        }
        std::size_t i = idx[depth];
        const auto& me = order[i];
        for (const auto& cand : infos[i]) {
            bool ok = true;
            for (std::size_t k = 0; k < depth && ok; ++k) {
                std::size_t j = idx[k];
                const auto& other = order[j];
                ok = channel_ok(get(cand.sends, other), get(chosen[j]->recvs, me), complete) &&
                     channel_ok(get(chosen[j]->sends, me), get(cand.recvs, other), complete);
            }
            // A channel towards a lifeline outside the program can never be matched.
            if (ok) {
                for (const auto& [peer, rs] : cand.recvs)
                    if (!d.count(peer) && !rs.empty()) ok = false;
                if (complete)
                    for (const auto& [peer, ss] : cand.sends)
                        if (!d.count(peer) && !ss.empty()) ok = false;
            }
            if (!ok) continue;
            chosen[i] = &cand;
            go(depth + 1);
        }
        chosen[i] = nullptr;
    };
    go(0);
    return out;
}

} // namespace

MscSet global_semantics(const GlobalWorkflow& p, const Bound& bound,
                        const std::set<Lifeline>& universe) {
    auto ls = universe;
    if (ls.empty()) ls = participation_set(p);
    MscSet out;
    for (auto& m : GlobalEnum(ls, bound).run(p)) out.insert(std::move(m));
    return out;
}

WordSet local_traces(const Lifeline& at, const LocalProgram& s, const Bound& bound) {
    WordSet out;
    for (auto& w : LocalEnum(at, bound).run(s)) out.insert(std::move(w));
    return out;
}

WordSet local_prefixes(const Lifeline& at, const LocalProgram& s, const Bound& bound) {
    WordSet out;
    for (const auto& [_, w] : local_traces(at, s, bound)) {
        for (std::size_t n = 0; n <= w.size(); ++n) {
            out.insert(LocalWord(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(n)));
            guard(out.size(), bound, "local prefixes");
        }
    }
    return out;
}

MscSet distributed_semantics(const DistributedProgram& d, const Bound& bound) {
    return combine(d, bound, true);
}

MscSet distributed_prefix_semantics(const DistributedProgram& d, const Bound& bound) {
    return combine(d, bound, false);
}

} // namespace mscflow
