#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mscflow/condition.hpp"
#include "mscflow/value.hpp"
#include "mscflow/workflow.hpp"

namespace mscflow {

enum class ChoiceKind { if_true, if_false, while_true, while_false };

/// `ifT`, `ifF`, `whT`, `whF`.
std::string_view to_string(ChoiceKind k) noexcept;
std::optional<ChoiceKind> parse_choice_kind(std::string_view s) noexcept;

/// One event of a local word. Immutable; copies share storage. Equality and
/// ordering use a canonical text key computed at construction.
class Letter {
public:
    enum class Kind { send, recv, action, choice };

    static Letter send(Lifeline at, Payload payload, Lifeline to,
                       std::optional<ControlTag> control = std::nullopt);
    static Letter recv(Lifeline at, Payload payload, Lifeline from,
                       std::optional<ControlTag> control = std::nullopt);
    static Letter action(Lifeline at, Payload outputs, std::string action, Payload inputs);
    static Letter choice(ChoiceKind kind, Condition cond, Lifeline owner);

    Kind kind() const noexcept { return d_->kind; }
    const Lifeline& at() const noexcept { return d_->at; }
    /// Receiver of a send, sender of a receive.
    const Lifeline& peer() const noexcept { return d_->peer; }
    /// Send/receive payload, or action outputs.
    const Payload& payload() const noexcept { return d_->payload; }
    const Payload& outputs() const noexcept { return d_->payload; }
    const Payload& inputs() const noexcept { return d_->inputs; }
    const std::string& action_name() const noexcept { return d_->action; }
    const std::optional<ControlTag>& control() const noexcept { return d_->control; }
    bool is_control() const noexcept { return d_->control.has_value(); }
    ChoiceKind choice_kind() const noexcept { return d_->choice; }
    const Condition& cond() const noexcept { return d_->cond; }

    bool is_send() const noexcept { return kind() == Kind::send; }
    bool is_recv() const noexcept { return kind() == Kind::recv; }

    /// Canonical text form, e.g. `send A(x, 1) -> B`, `recv B(true) <- A [ctrl 0]`,
    /// `act A: (y) = f(x)`, `ifT(c)@B`.
    const std::string& key() const noexcept { return d_->key; }

    /// Same letter with payload/outputs and inputs replaced.
    Letter with_atoms(Payload payload, Payload inputs) const;

    nlohmann::json to_json() const;
    static Letter from_json(const Lifeline& at, const nlohmann::json& j);

    friend bool operator==(const Letter& a, const Letter& b) {
        return a.d_ == b.d_ || a.d_->key == b.d_->key;
    }
    friend bool operator<(const Letter& a, const Letter& b) { return a.d_->key < b.d_->key; }

private:
    struct Data {
        Kind kind = Kind::send;
        Lifeline at;
        Lifeline peer;
        Payload payload;
        Payload inputs;
        std::string action;
        std::optional<ControlTag> control;
        ChoiceKind choice = ChoiceKind::if_true;
        Condition cond;
        std::string key;
    };
    explicit Letter(std::shared_ptr<const Data> d) : d_(std::move(d)) {}
    static Letter make(Data d);
    std::shared_ptr<const Data> d_;
};

using LocalWord = std::vector<Letter>;

std::string word_to_string(const LocalWord& w);
bool is_word_prefix(const LocalWord& u, const LocalWord& v);

/// An event (A, i), 1-based.
struct EventRef {
    Lifeline lifeline;
    std::size_t index = 0;
    friend auto operator<=>(const EventRef&, const EventRef&) = default;
    friend bool operator==(const EventRef&, const EventRef&) = default;
    std::string to_string() const;
};

/// A tuple of local words, total over its lifeline set.
class MscTuple {
public:
    MscTuple() = default;
    explicit MscTuple(const std::set<Lifeline>& lifelines);

    std::set<Lifeline> lifelines() const;
    bool has(const Lifeline& l) const { return words_.count(l) != 0; }
    const LocalWord& word(const Lifeline& l) const;
    LocalWord& word(const Lifeline& l);
    void append(const Letter& letter);
    const std::map<Lifeline, LocalWord>& words() const noexcept { return words_; }
    std::size_t event_count() const;
    bool empty() const { return event_count() == 0; }

    /// Canonical comparison key.
    std::string key() const;
    std::string to_string() const;
    nlohmann::json to_json() const;
    static MscTuple from_json(const nlohmann::json& j);

    friend bool operator==(const MscTuple&, const MscTuple&) = default;

private:
    std::map<Lifeline, LocalWord> words_;
};

using FifoPair = std::pair<EventRef, EventRef>;

std::vector<FifoPair> fifo_relation(const MscTuple& m);

struct MscViolation {
    enum class Kind { unmatched_receive, payload_mismatch, cycle };
    Kind kind;
    std::vector<EventRef> events;
    std::string message;
};

std::string_view to_string(MscViolation::Kind k) noexcept;

struct MscCheck {
    std::optional<MscViolation> violation;
    bool ok() const { return !violation; }
    explicit operator bool() const { return ok(); }
};

MscCheck is_msc(const MscTuple& m);
/// Precondition: is_msc(m). Throws Errc::contract otherwise.
bool is_complete(const MscTuple& m);
/// Every send matched; no MSC precondition.
bool all_sends_matched(const MscTuple& m);

/// Untyped payload match used on MSC letters: equal arity and receiver
/// constants matched by identical sender constants.
bool payload_matches(const Payload& send, const Payload& recv);

/// Throws Errc::contract on different lifeline sets.
MscTuple concat(const MscTuple& a, const MscTuple& b);
MscTuple erase(const MscTuple& m);
LocalWord erase(const LocalWord& w);
bool is_prefix(const MscTuple& a, const MscTuple& b);

/// Canonical single-step MSCs.
MscTuple msc_message(const std::set<Lifeline>& ls, const Lifeline& from, const Payload& x,
                     const Lifeline& to, const Payload& y);
MscTuple msc_action(const std::set<Lifeline>& ls, const Lifeline& at, const Payload& outputs,
                    const std::string& action, const Payload& inputs);
MscTuple msc_choice(const std::set<Lifeline>& ls, ChoiceKind kind, const Condition& c,
                    const Lifeline& owner);

/// Set of tuples keyed canonically.
class MscSet {
public:
    bool insert(MscTuple m);
    bool contains(const MscTuple& m) const { return items_.count(m.key()) != 0; }
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    std::vector<MscTuple> to_vector() const;
    nlohmann::json to_json() const;

    friend bool operator==(const MscSet& a, const MscSet& b);

private:
    std::map<std::string, MscTuple> items_;
};

/// Set of words keyed canonically.
class WordSet {
public:
    bool insert(LocalWord w);
    bool contains(const LocalWord& w) const;
    std::size_t size() const noexcept { return items_.size(); }
    bool empty() const noexcept { return items_.empty(); }
    auto begin() const { return items_.begin(); }
    auto end() const { return items_.end(); }
    std::vector<LocalWord> to_vector() const;

private:
    std::map<std::string, LocalWord> items_;
};

} // namespace mscflow
