#include "mscflow/msc.hpp"

#include <algorithm>
#include <deque>

#include "mscflow/error.hpp"
#include "mscflow/parser.hpp"

namespace mscflow {

std::string_view to_string(ChoiceKind k) noexcept {
    switch (k) {
    case ChoiceKind::if_true: return "ifT";
    case ChoiceKind::if_false: return "ifF";
    case ChoiceKind::while_true: return "whT";
    case ChoiceKind::while_false: return "whF";
    }
    return "?";
}

std::optional<ChoiceKind> parse_choice_kind(std::string_view s) noexcept {
    for (auto k : {ChoiceKind::if_true, ChoiceKind::if_false, ChoiceKind::while_true,
                   ChoiceKind::while_false})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

Letter Letter::make(Data d) {
    std::string k;
    switch (d.kind) {
    case Kind::send:
        k = "send " + d.at.name() + "(" + payload_to_source(d.payload) + ") -> " + d.peer.name();
        break;
    case Kind::recv:
        k = "recv " + d.at.name() + "(" + payload_to_source(d.payload) + ") <- " + d.peer.name();
        break;
    case Kind::action:
        k = "act " + d.at.name() + ": (" + payload_to_source(d.payload) + ") = " + d.action + "(" +
            payload_to_source(d.inputs) + ")";
        break;
    case Kind::choice:
        k = std::string(to_string(d.choice)) + "(" + d.cond.to_source() + ")@" + d.at.name();
        break;
    }
    if (d.control) k += " [ctrl " + d.control->str() + "]";
    d.key = std::move(k);
    return Letter(std::make_shared<const Data>(std::move(d)));
}

Letter Letter::send(Lifeline at, Payload payload, Lifeline to, std::optional<ControlTag> control) {
    if (at == to) throw Error(Errc::contract, "send letter on a self channel at " + at.name());
    Data d;
    d.kind = Kind::send;
    d.at = std::move(at);
    d.peer = std::move(to);
    d.payload = std::move(payload);
    d.control = std::move(control);
    return make(std::move(d));
}

Letter Letter::recv(Lifeline at, Payload payload, Lifeline from,
                    std::optional<ControlTag> control) {
    if (at == from) throw Error(Errc::contract, "recv letter on a self channel at " + at.name());
    Data d;
    d.kind = Kind::recv;
    d.at = std::move(at);
    d.peer = std::move(from);
    d.payload = std::move(payload);
    d.control = std::move(control);
    return make(std::move(d));
}

Letter Letter::action(Lifeline at, Payload outputs, std::string action, Payload inputs) {
    Data d;
    d.kind = Kind::action;
    d.at = std::move(at);
    d.payload = std::move(outputs);
    d.action = std::move(action);
    d.inputs = std::move(inputs);
    return make(std::move(d));
}

Letter Letter::choice(ChoiceKind kind, Condition cond, Lifeline owner) {
    Data d;
    d.kind = Kind::choice;
    d.at = std::move(owner);
    d.choice = kind;
    d.cond = std::move(cond);
    return make(std::move(d));
}

Letter Letter::with_atoms(Payload payload, Payload inputs) const {
    Data d = *d_;
    d.payload = std::move(payload);
    d.inputs = std::move(inputs);
    return make(std::move(d));
}

namespace {

nlohmann::json payload_json(const Payload& p) {
    auto a = nlohmann::json::array();
    for (const auto& x : p) a.push_back(x.to_json());
    return a;
}

Payload payload_from_json(const nlohmann::json& j) {
    Payload p;
    for (const auto& x : j) p.push_back(Atom::from_json(x));
    return p;
}

} // namespace

nlohmann::json Letter::to_json() const {
    nlohmann::json j;
    switch (kind()) {
    case Kind::send:
    case Kind::recv:
        j["kind"] = kind() == Kind::send ? "send" : "recv";
        j["peer"] = peer().name();
        j["payload"] = payload_json(payload());
        if (control()) j["control"] = control()->str();
        break;
    case Kind::action:
        j["kind"] = "action";
        j["action"] = action_name();
        j["outputs"] = payload_json(outputs());
        j["inputs"] = payload_json(inputs());
        break;
    case Kind::choice:
        j["kind"] = "choice";
        j["choice"] = std::string(to_string(choice_kind()));
        j["cond"] = cond().to_source();
        break;
    }
    return j;
}

Letter Letter::from_json(const Lifeline& at, const nlohmann::json& j) {
    try {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "send" || kind == "recv") {
            std::optional<ControlTag> control;
            if (j.contains("control") && !j["control"].is_null())
                control = ControlTag(j["control"].get<std::string>());
            Lifeline peer(j.at("peer").get<std::string>());
            auto p = payload_from_json(j.at("payload"));
            return kind == "send" ? send(at, std::move(p), peer, control)
                                  : recv(at, std::move(p), peer, control);
        }
        if (kind == "action") {
            return action(at, payload_from_json(j.at("outputs")),
                          j.at("action").get<std::string>(),
                          payload_from_json(j.value("inputs", nlohmann::json::array())));
        }
        if (kind == "choice") {
            auto ck = parse_choice_kind(j.at("choice").get<std::string>());
            if (!ck) throw Error(Errc::syntax, "unknown choice kind in trace letter");
            auto c = parse_condition(j.at("cond").get<std::string>());
            if (!c.ok()) throw Error(Errc::syntax, "bad condition in trace letter");
            return choice(*ck, *c.value, at);
        }
        throw Error(Errc::syntax, "unknown letter kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::syntax, std::string("malformed trace letter: ") + e.what());
    }
}

std::string word_to_string(const LocalWord& w) {
    std::string s;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i) s += " . ";
        s += w[i].key();
    }
    return s.empty() ? "eps" : s;
}

bool is_word_prefix(const LocalWord& u, const LocalWord& v) {
    if (u.size() > v.size()) return false;
    return std::equal(u.begin(), u.end(), v.begin());
}

std::string EventRef::to_string() const {
    return "(" + lifeline.name() + "," + std::to_string(index) + ")";
}

MscTuple::MscTuple(const std::set<Lifeline>& lifelines) {
    for (const auto& l : lifelines) words_[l];
}

std::set<Lifeline> MscTuple::lifelines() const {
    std::set<Lifeline> out;
    for (const auto& [l, _] : words_) out.insert(l);
    return out;
}

const LocalWord& MscTuple::word(const Lifeline& l) const {
    auto it = words_.find(l);
    if (it == words_.end()) throw Error(Errc::contract, "lifeline " + l.name() + " not in tuple");
    return it->second;
}

LocalWord& MscTuple::word(const Lifeline& l) { return words_[l]; }

void MscTuple::append(const Letter& letter) { words_[letter.at()].push_back(letter); }

std::size_t MscTuple::event_count() const {
    std::size_t n = 0;
    for (const auto& [_, w] : words_) n += w.size();
    return n;
}

std::string MscTuple::key() const {
    std::string s;
    for (const auto& [l, w] : words_) {
        s += l.name();
        s += ':';
        for (const auto& x : w) {
            s += x.key();
            s += '\x1f';
        }
        s += '\x1e';
    }
    return s;
}

std::string MscTuple::to_string() const {
    std::string s;
    for (const auto& [l, w] : words_) s += l.name() + ": " + word_to_string(w) + "\n";
    return s;
}

nlohmann::json MscTuple::to_json() const {
    auto j = nlohmann::json::object();
    for (const auto& [l, w] : words_) {
        auto a = nlohmann::json::array();
        for (const auto& x : w) a.push_back(x.to_json());
        j[l.name()] = std::move(a);
    }
    return j;
}

MscTuple MscTuple::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(Errc::syntax, "trace document must be an object");
    MscTuple m;
    for (const auto& [name, letters] : j.items()) {
        Lifeline l(name);
        auto& w = m.word(l);
        if (!letters.is_array())
            throw Error(Errc::syntax, "trace entry for " + name + " must be a list");
        for (const auto& x : letters) w.push_back(Letter::from_json(l, x));
    }
    return m;
}

namespace {

struct Channels {
    // (from, to) -> ordered send / receive events
    std::map<std::pair<Lifeline, Lifeline>, std::vector<std::size_t>> sends, recvs;
};

Channels collect(const MscTuple& m) {
    Channels c;
    for (const auto& [l, w] : m.words()) {
        for (std::size_t i = 0; i < w.size(); ++i) {
            if (w[i].is_send()) c.sends[{l, w[i].peer()}].push_back(i + 1);
            else if (w[i].is_recv()) c.recvs[{w[i].peer(), l}].push_back(i + 1);
        }
    }
    return c;
}

} // namespace

std::vector<FifoPair> fifo_relation(const MscTuple& m) {
    auto c = collect(m);
    std::vector<FifoPair> out;
    for (const auto& [ch, ss] : c.sends) {
        auto it = c.recvs.find(ch);
        if (it == c.recvs.end()) continue;
        const auto& rs = it->second;
        for (std::size_t i = 0; i < std::min(ss.size(), rs.size()); ++i)
            out.push_back({EventRef{ch.first, ss[i]}, EventRef{ch.second, rs[i]}});
    }
    return out;
}

std::string_view to_string(MscViolation::Kind k) noexcept {
    switch (k) {
    case MscViolation::Kind::unmatched_receive: return "unmatched-receive";
    case MscViolation::Kind::payload_mismatch: return "payload-mismatch";
    case MscViolation::Kind::cycle: return "cycle";
    }
    return "?";
}

bool payload_matches(const Payload& send, const Payload& recv) {
    if (send.size() != recv.size()) return false;
    for (std::size_t i = 0; i < send.size(); ++i) {
        if (recv[i].is_const() && !(send[i].is_const() && send[i].value() == recv[i].value()))
            return false;
    }
    return true;
}

MscCheck is_msc(const MscTuple& m) {
    auto c = collect(m);

    // (1) every receive matched
    std::optional<EventRef> unmatched;
    for (const auto& [ch, rs] : c.recvs) {
        auto it = c.sends.find(ch);
        std::size_t n = it == c.sends.end() ? 0 : it->second.size();
        if (rs.size() > n) {
            EventRef e{ch.second, rs[n]};
            if (!unmatched || e < *unmatched) unmatched = e;
        }
    }
    if (unmatched) {
        return {MscViolation{MscViolation::Kind::unmatched_receive, {*unmatched},
                             "receive at " + unmatched->to_string() + " is not matched"}};
    }

    // (2) payload match on every matched pair
    std::optional<FifoPair> bad;
    for (const auto& [ch, ss] : c.sends) {
        auto it = c.recvs.find(ch);
        if (it == c.recvs.end()) continue;
        const auto& rs = it->second;
        const auto& ws = m.word(ch.first);
        const auto& wr = m.word(ch.second);
        for (std::size_t i = 0; i < std::min(ss.size(), rs.size()); ++i) {
            const auto& s = ws[ss[i] - 1];
            const auto& r = wr[rs[i] - 1];
            if (s.control() != r.control() || !payload_matches(s.payload(), r.payload())) {
                FifoPair p{EventRef{ch.first, ss[i]}, EventRef{ch.second, rs[i]}};
                if (!bad || p.second < bad->second) bad = p;
                break;
            }
        }
    }
    if (bad) {
        const auto& s = m.word(bad->first.lifeline)[bad->first.index - 1];
        const auto& r = m.word(bad->second.lifeline)[bad->second.index - 1];
        return {MscViolation{MscViolation::Kind::payload_mismatch,
                             {bad->first, bad->second},
                             "payload mismatch between " + bad->first.to_string() + " '" +
                                 s.key() + "' and " + bad->second.to_string() + " '" + r.key() +
                                 "'"}};
    }

    // (3) acyclicity by Kahn's algorithm
    std::map<Lifeline, std::size_t> base;
    std::vector<EventRef> events;
    for (const auto& [l, w] : m.words()) {
        base[l] = events.size();
        for (std::size_t i = 0; i < w.size(); ++i) events.push_back(EventRef{l, i + 1});
    }
    std::vector<std::vector<std::size_t>> succ(events.size());
    std::vector<std::size_t> indeg(events.size(), 0);
    auto id = [&](const EventRef& e) { return base[e.lifeline] + e.index - 1; };
    for (const auto& [l, w] : m.words()) {
        for (std::size_t i = 1; i < w.size(); ++i) {
            succ[base[l] + i - 1].push_back(base[l] + i);
            ++indeg[base[l] + i];
        }
    }
    for (const auto& [s, r] : fifo_relation(m)) {
        succ[id(s)].push_back(id(r));
        ++indeg[id(r)];
    }
    std::deque<std::size_t> ready;
    for (std::size_t i = 0; i < events.size(); ++i)
        if (indeg[i] == 0) ready.push_back(i);
    std::size_t seen = 0;
    while (!ready.empty()) {
        auto v = ready.front();
        ready.pop_front();
        ++seen;
        for (auto w : succ[v])
            if (--indeg[w] == 0) ready.push_back(w);
    }
    if (seen != events.size()) {
        std::vector<EventRef> stuck;
        for (std::size_t i = 0; i < events.size(); ++i)
            if (indeg[i] != 0) stuck.push_back(events[i]);
        std::string msg = "causality cycle through";
        for (const auto& e : stuck) msg += " " + e.to_string();
        return {MscViolation{MscViolation::Kind::cycle, std::move(stuck), std::move(msg)}};
    }
    return {};
}

bool all_sends_matched(const MscTuple& m) {
    auto c = collect(m);
    for (const auto& [ch, ss] : c.sends) {
        auto it = c.recvs.find(ch);
        if (it == c.recvs.end() || it->second.size() < ss.size()) return false;
    }
    return true;
}

bool is_complete(const MscTuple& m) {
    auto r = is_msc(m);
    if (!r) throw Error(Errc::contract, "is_complete called on a non-MSC: " + r.violation->message);
    return all_sends_matched(m);
}

namespace {

void require_same_lifelines(const MscTuple& a, const MscTuple& b, const char* op) {
    if (a.lifelines() != b.lifelines())
        throw Error(Errc::contract, std::string(op) + ": lifeline sets differ");
}

} // namespace

MscTuple concat(const MscTuple& a, const MscTuple& b) {
    require_same_lifelines(a, b, "concat");
    MscTuple out = a;
    for (const auto& [l, w] : b.words()) {
        auto& dst = out.word(l);
        dst.insert(dst.end(), w.begin(), w.end());
    }
    return out;
}

LocalWord erase(const LocalWord& w) {
    LocalWord out;
    out.reserve(w.size());
    for (const auto& x : w)
        if (!x.is_control()) out.push_back(x);
    return out;
}

MscTuple erase(const MscTuple& m) {
    MscTuple out;
    for (const auto& [l, w] : m.words()) out.word(l) = erase(w);
    return out;
}

bool is_prefix(const MscTuple& a, const MscTuple& b) {
    require_same_lifelines(a, b, "is_prefix");
    for (const auto& [l, w] : a.words())
        if (!is_word_prefix(w, b.word(l))) return false;
    return true;
}

MscTuple msc_message(const std::set<Lifeline>& ls, const Lifeline& from, const Payload& x,
                     const Lifeline& to, const Payload& y) {
    MscTuple m(ls);
    m.append(Letter::send(from, x, to));
    m.append(Letter::recv(to, y, from));
    return m;
}

MscTuple msc_action(const std::set<Lifeline>& ls, const Lifeline& at, const Payload& outputs,
                    const std::string& action, const Payload& inputs) {
    MscTuple m(ls);
    m.append(Letter::action(at, outputs, action, inputs));
    return m;
}

MscTuple msc_choice(const std::set<Lifeline>& ls, ChoiceKind kind, const Condition& c,
                    const Lifeline& owner) {
    MscTuple m(ls);
    m.append(Letter::choice(kind, c, owner));
    return m;
}

bool MscSet::insert(MscTuple m) {
    auto k = m.key();
    return items_.emplace(std::move(k), std::move(m)).second;
}

std::vector<MscTuple> MscSet::to_vector() const {
    std::vector<MscTuple> out;
    for (const auto& [_, m] : items_) out.push_back(m);
    return out;
}

nlohmann::json MscSet::to_json() const {
    auto a = nlohmann::json::array();
    for (const auto& [_, m] : items_) a.push_back(m.to_json());
    return a;
}

bool operator==(const MscSet& a, const MscSet& b) {
    if (a.items_.size() != b.items_.size()) return false;
    for (const auto& [k, _] : a.items_)
        if (!b.items_.count(k)) return false;
    return true;
}

namespace {

std::string word_key(const LocalWord& w) {
    std::string s;
    for (const auto& x : w) {
        s += x.key();
        s += '\x1f';
    }
    return s;
}

} // namespace

bool WordSet::insert(LocalWord w) {
    auto k = word_key(w);
    return items_.emplace(std::move(k), std::move(w)).second;
}

bool WordSet::contains(const LocalWord& w) const { return items_.count(word_key(w)) != 0; }

std::vector<LocalWord> WordSet::to_vector() const {
    std::vector<LocalWord> out;
    for (const auto& [_, w] : items_) out.push_back(w);
    return out;
}

} // namespace mscflow
