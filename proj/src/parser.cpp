#include "mscflow/parser.hpp"

#include <set>

#include "lexer.hpp"

namespace mscflow {

std::string_view to_string(ActionKind k) noexcept {
    switch (k) {
    case ActionKind::llm: return "llm";
    case ActionKind::pure: return "pure";
    case ActionKind::planner: return "planner";
    }
    return "?";
}

std::string ActionDecl::signature() const {
    auto list = [](const std::vector<TypedName>& xs) {
        std::string s;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) s += ", ";
            s += xs[i].name + ": " + std::string(type_name(xs[i].type));
        }
        return s;
    };
    return name + "(" + list(inputs) + ") -> (" + list(outputs) + ")";
}

ActionRegistry make_registry(const std::vector<ActionDecl>& decls) {
    ActionRegistry reg;
    for (const auto& d : decls) reg[d.name] = d;
    return reg;
}

namespace {

using detail::Tok;
using detail::Token;

const std::set<std::string, std::less<>> kKeywords = {
    "workflow", "var", "act", "msg", "if", "then", "else", "while", "do", "exit",
    "return", "epsilon", "true", "false", "not", "and", "or", "llm", "pure", "planner",
};

struct SyntaxError {
    Diagnostic diag;
};

SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
    return SourceSpan{a.begin, b.end, a.line, a.column};
}

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    SourceUnit unit() {
        SourceUnit out;
        while (!at_end()) {
            if (is_word("workflow")) {
                out.workflows.push_back(workflow());
            } else if (is_word("llm") || is_word("pure") || is_word("planner")) {
                out.actions.push_back(action());
            } else {
                fail("expected 'workflow', 'llm', 'pure' or 'planner'");
            }
        }
        return out;
    }

    Condition standalone_condition() {
        auto c = condition();
        if (!at_end()) fail("unexpected trailing input after condition");
        return c;
    }

private:
    // ---- token helpers -------------------------------------------------

    const Token& cur() const { return toks_[pos_]; }
    const Token& prev() const { return toks_[pos_ ? pos_ - 1 : 0]; }
    bool at_end() const { return cur().kind == Tok::end; }
    bool is(Tok t) const { return cur().kind == t; }
    bool is_word(std::string_view w) const { return is(Tok::ident) && cur().text == w; }

    [[noreturn]] void fail(std::string msg, std::string code = "syntax") const {
        throw SyntaxError{Diagnostic{Severity::error, std::move(code), std::move(msg), cur().span}};
    }
    [[noreturn]] void fail_at(const SourceSpan& span, std::string msg,
                              std::string code = "syntax") const {
        throw SyntaxError{Diagnostic{Severity::error, std::move(code), std::move(msg), span}};
    }

    const Token& expect(Tok t) {
        if (!is(t))
            fail(std::string("expected ") + detail::describe(t) + ", found " + found());
        return toks_[pos_++];
    }

    bool accept(Tok t) {
        if (!is(t)) return false;
        ++pos_;
        return true;
    }

    void expect_word(std::string_view w) {
        if (!is_word(w)) fail("expected '" + std::string(w) + "', found " + found());
        ++pos_;
    }

    bool accept_word(std::string_view w) {
        if (!is_word(w)) return false;
        ++pos_;
        return true;
    }

    std::string found() const {
        if (is(Tok::ident)) return "'" + cur().text + "'";
        if (is(Tok::string)) return "string literal";
        if (is(Tok::integer)) return "integer '" + cur().text + "'";
        return detail::describe(cur().kind);
    }

    /// A user identifier: not a keyword, not in the reserved namespace.
    std::string identifier(const char* what) {
        if (!is(Tok::ident)) fail(std::string("expected ") + what + ", found " + found());
        const auto& t = cur();
        if (kKeywords.count(t.text)) fail(std::string("expected ") + what + ", found keyword '" +
                                          t.text + "'");
        if (t.text.rfind(kReservedPrefix, 0) == 0)
            fail("identifier '" + t.text + "' uses the reserved prefix '" +
                     std::string(kReservedPrefix) + "'",
                 "reserved");
        ++pos_;
        return t.text;
    }

    Lifeline lifeline() { return Lifeline(identifier("lifeline name")); }

    ValueType type() {
        if (!is(Tok::ident)) fail("expected type, found " + found());
        auto t = parse_type_name(cur().text);
        if (!t) fail("unknown type '" + cur().text + "' (expected str, int or bool)", "type");
        ++pos_;
        return *t;
    }

    std::optional<Value> try_constant() {
        if (is(Tok::string)) return Value::string(toks_[pos_++].text);
        if (is(Tok::integer)) {
            try {
                auto v = Value::integer(std::stoll(cur().text));
                ++pos_;
                return v;
            } catch (const std::out_of_range&) {
                fail("integer literal out of range", "lexical");
            }
        }
        if (is_word("true")) {
            ++pos_;
            return Value::boolean(true);
        }
        if (is_word("false")) {
            ++pos_;
            return Value::boolean(false);
        }
        return std::nullopt;
    }

    Value constant() {
        auto v = try_constant();
        if (!v) fail("expected constant, found " + found());
        return *v;
    }

    Atom atom() {
        if (auto v = try_constant()) return Atom::constant(std::move(*v));
        return Atom::var(identifier("variable or constant"));
    }

    Payload atoms_in_parens() {
        expect(Tok::lparen);
        Payload out;
        if (!is(Tok::rparen)) {
            do {
                out.push_back(atom());
            } while (accept(Tok::comma));
        }
        expect(Tok::rparen);
        return out;
    }

    // ---- conditions ----------------------------------------------------

    Condition condition() { return disjunction(); }

    Condition disjunction() {
        auto start = cur().span;
        auto lhs = conjunction();
        while (accept_word("or")) {
            auto rhs = conjunction();
            lhs = Condition::binary(Condition::Op::disj, lhs, rhs, join(start, prev().span));
        }
        return lhs;
    }

    Condition conjunction() {
        auto start = cur().span;
        auto lhs = negation();
        while (accept_word("and")) {
            auto rhs = negation();
            lhs = Condition::binary(Condition::Op::conj, lhs, rhs, join(start, prev().span));
        }
        return lhs;
    }

    Condition negation() {
        auto start = cur().span;
        if (accept_word("not")) {
            auto inner = negation();
            return Condition::negate(inner, join(start, prev().span));
        }
        return comparison();
    }

    Condition comparison() {
        auto start = cur().span;
        auto lhs = primary();
        Condition::Op op;
        if (is(Tok::eqeq)) op = Condition::Op::eq;
        else if (is(Tok::lt)) op = Condition::Op::lt;
        else if (is(Tok::le)) op = Condition::Op::le;
        else return lhs;
        ++pos_;
        auto rhs = primary();
        return Condition::binary(op, lhs, rhs, join(start, prev().span));
    }

    Condition primary() {
        auto start = cur().span;
        if (accept(Tok::lparen)) {
            auto inner = condition();
            expect(Tok::rparen);
            return inner;
        }
        if (auto v = try_constant()) return Condition::literal(*v, join(start, prev().span));
        auto name = identifier("condition operand");
        return Condition::var(name, join(start, prev().span));
    }

    // ---- statements ----------------------------------------------------

    GlobalWorkflow statement() {
        auto start = cur().span;
        if (accept_word("epsilon")) return gw::epsilon(start);
        if (accept_word("msg")) {
            auto from = lifeline();
            auto send = atoms_in_parens();
            expect(Tok::arrow);
            auto to = lifeline();
            auto recv = atoms_in_parens();
            return gw::msg(from, std::move(send), to, std::move(recv), join(start, prev().span));
        }
        if (accept_word("act")) {
            auto at = lifeline();
            expect(Tok::colon);
            Payload outs;
            if (accept(Tok::lparen)) {
                if (!is(Tok::rparen)) {
                    do {
                        outs.push_back(Atom::var(identifier("output variable")));
                    } while (accept(Tok::comma));
                }
                expect(Tok::rparen);
            } else {
                outs.push_back(Atom::var(identifier("output variable")));
            }
            expect(Tok::assign);
            auto fn = identifier("action name");
            auto ins = atoms_in_parens();
            return gw::act(at, std::move(outs), fn, std::move(ins), join(start, prev().span));
        }
        if (accept_word("if")) {
            auto c = condition();
            expect(Tok::at);
            auto owner = lifeline();
            expect_word("then");
            auto t = block();
            GlobalWorkflow e = gw::epsilon(prev().span);
            if (accept_word("else")) e = block();
            return gw::if_(c, owner, t, e, {}, join(start, prev().span));
        }
        if (accept_word("while")) {
            auto c = condition();
            expect(Tok::at);
            auto owner = lifeline();
            accept_word("do");
            auto body = block();
            expect_word("exit");
            auto ex = block();
            return gw::while_(c, owner, body, ex, {}, join(start, prev().span));
        }
        if (is(Tok::lbrace)) return block();
        if (is_word("var")) fail("variable declarations are only allowed at workflow top level");
        if (is_word("return")) fail("'return' is only allowed as the last workflow statement");
        fail("expected statement, found " + found());
    }

    static GlobalWorkflow sequence(std::vector<GlobalWorkflow> items, SourceSpan whole) {
        if (items.empty()) return gw::epsilon(whole);
        GlobalWorkflow acc = items.back();
        for (auto it = items.rbegin() + 1; it != items.rend(); ++it)
            acc = gw::seq(*it, acc, join(it->span(), acc.span()));
        return acc;
    }

    GlobalWorkflow block() {
        auto start = cur().span;
        expect(Tok::lbrace);
        std::vector<GlobalWorkflow> items;
        while (!is(Tok::rbrace)) {
            if (at_end()) fail("unterminated block: expected '}'");
            items.push_back(statement());
            while (accept(Tok::semicolon)) {
            }
        }
        expect(Tok::rbrace);
        return sequence(std::move(items), join(start, prev().span));
    }

    // ---- declarations --------------------------------------------------

    WorkflowDecl workflow() {
        auto start = cur().span;
        expect_word("workflow");
        WorkflowDecl d;
        d.name = identifier("workflow name");
        expect(Tok::lparen);
        if (!is(Tok::rparen)) {
            do {
                auto ps = cur().span;
                VarDecl p;
                p.name = identifier("parameter name");
                expect(Tok::colon);
                p.type = type();
                expect(Tok::at);
                p.owner = lifeline();
                p.span = join(ps, prev().span);
                d.params.push_back(std::move(p));
            } while (accept(Tok::comma));
        }
        expect(Tok::rparen);
        if (accept(Tok::arrow)) d.return_type = type();
        auto body_start = cur().span;
        expect(Tok::lbrace);
        std::vector<GlobalWorkflow> items;
        bool returned = false;
        while (!is(Tok::rbrace)) {
            if (at_end()) fail("unterminated workflow body: expected '}'");
            if (is_word("var")) {
                auto vs = cur().span;
                ++pos_;
                VarDecl v;
                v.name = identifier("variable name");
                expect(Tok::colon);
                v.type = type();
                expect(Tok::assign);
                v.initial = constant();
                expect(Tok::at);
                v.owner = lifeline();
                v.span = join(vs, prev().span);
                d.vars.push_back(std::move(v));
            } else if (is_word("return")) {
                ++pos_;
                d.return_var = identifier("return variable");
                expect(Tok::at);
                d.return_at = lifeline();
                returned = true;
                while (accept(Tok::semicolon)) {
                }
                if (!is(Tok::rbrace)) fail("'return' must be the last statement of the workflow");
                break;
            } else {
                items.push_back(statement());
            }
            while (accept(Tok::semicolon)) {
            }
        }
        if (!returned)
            fail("workflow '" + d.name + "' is missing its terminal 'return var @ Lifeline'",
                 "missing-return");
        expect(Tok::rbrace);
        d.body = sequence(std::move(items), join(body_start, prev().span));
        d.span = join(start, prev().span);

        std::set<std::pair<std::string, std::string>> seen;
        for (const auto* list : {&d.params, &d.vars}) {
            for (const auto& v : *list) {
                if (!seen.insert({v.owner.name(), v.name}).second)
                    fail_at(v.span,
                            "duplicate declaration of '" + v.name + "' at " + v.owner.name(),
                            "duplicate");
            }
        }
        return d;
    }

    std::vector<TypedName> typed_list() {
        std::vector<TypedName> out;
        expect(Tok::lparen);
        if (!is(Tok::rparen)) {
            do {
                TypedName t;
                t.name = identifier("parameter name");
                expect(Tok::colon);
                t.type = type();
                out.push_back(std::move(t));
            } while (accept(Tok::comma));
        }
        expect(Tok::rparen);
        return out;
    }

    std::vector<std::string> word_list() {
        std::vector<std::string> out;
        expect(Tok::lbracket);
        if (!is(Tok::rbracket)) {
            do {
                if (is(Tok::string) || is(Tok::ident)) {
                    out.push_back(cur().text);
                    ++pos_;
                } else {
                    fail("expected list item, found " + found());
                }
            } while (accept(Tok::comma));
        }
        expect(Tok::rbracket);
        return out;
    }

    std::string string_field() { return expect(Tok::string).text; }

    void check_placeholders(const ActionDecl& a, const std::string& tmpl, const SourceSpan& span) {
        std::size_t i = 0;
        while ((i = tmpl.find("{{", i)) != std::string::npos) {
            auto j = tmpl.find("}}", i + 2);
            if (j == std::string::npos) fail_at(span, "unterminated '{{' placeholder", "placeholder");
            auto name = tmpl.substr(i + 2, j - i - 2);
            bool known = false;
            for (const auto& in : a.inputs) known = known || in.name == name;
            if (!known)
                fail_at(span, "placeholder '{{" + name + "}}' does not name an input of '" +
                                  a.name + "'",
                        "placeholder");
            i = j + 2;
        }
    }

    ActionDecl action() {
        auto start = cur().span;
        ActionDecl a;
        if (accept_word("llm")) a.kind = ActionKind::llm;
        else if (accept_word("pure")) a.kind = ActionKind::pure;
        else {
            expect_word("planner");
            a.kind = ActionKind::planner;
        }
        a.name = identifier("action name");
        a.inputs = typed_list();
        expect(Tok::arrow);
        if (is(Tok::lparen)) a.outputs = typed_list();
        else a.outputs.push_back(TypedName{"result", type()});

        std::set<std::string> fields;
        SourceSpan system_span, user_span;
        if (accept(Tok::lbrace)) {
            while (!is(Tok::rbrace)) {
                if (at_end()) fail("unterminated action body: expected '}'");
                auto fspan = cur().span;
                auto field = identifier("field name");
                expect(Tok::colon);
                if (!fields.insert(field).second) fail_at(fspan, "duplicate field '" + field + "'");
                auto bad = [&] {
                    fail_at(fspan, "field '" + field + "' is not valid for " +
                                       std::string(to_string(a.kind)) + " actions",
                            "field");
                };
                if (a.kind == ActionKind::llm) {
                    if (field == "system") {
                        system_span = cur().span;
                        a.system_template = string_field();
                    } else if (field == "user") {
                        user_span = cur().span;
                        a.user_template = string_field();
                    } else if (field == "parse") {
                        auto mspan = cur().span;
                        if (is(Tok::ident) || is(Tok::string)) {
                            a.parse_mode = cur().text;
                            ++pos_;
                        } else {
                            fail("expected parse mode, found " + found());
                        }
                        if (a.parse_mode != "json")
                            fail_at(mspan, "unknown parse mode '" + a.parse_mode +
                                               "' (only 'json' is supported)",
                                    "parse-mode");
                    } else {
                        bad();
                    }
                } else if (a.kind == ActionKind::planner) {
                    if (field == "description") a.description = string_field();
                    else if (field == "instructions") a.instructions = string_field();
                    else if (field == "allow") a.allow = word_list();
                    else if (field == "actions") a.vocabulary = word_list();
                    else if (field == "lifelines") {
                        for (auto& n : word_list()) a.lifelines.emplace_back(n);
                    } else bad();
                } else {
                    bad();
                }
                while (accept(Tok::semicolon) || accept(Tok::comma)) {
                }
            }
            expect(Tok::rbrace);
        }
        a.span = join(start, prev().span);

        if (a.kind == ActionKind::llm) {
            for (const char* req : {"system", "user", "parse"})
                if (!fields.count(req))
                    fail_at(a.span, "llm action '" + a.name + "' is missing field '" + req + "'",
                            "field");
            check_placeholders(a, a.system_template, system_span);
            check_placeholders(a, a.user_template, user_span);
        }
        if (a.kind == ActionKind::planner) {
            if (a.outputs.size() != 1)
                fail_at(a.span, "planner '" + a.name + "' must declare exactly one output", "field");
            if (a.lifelines.empty())
                fail_at(a.span, "planner '" + a.name + "' must declare its worker lifelines",
                        "field");
            for (const auto& w : a.allow)
                if (w != "llm" && w != "pure" && w != "if" && w != "while")
                    fail_at(a.span, "unknown allow entry '" + w + "'", "field");
        }
        return a;
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

template <class T, class F>
ParseResult<T> run_parser(std::string_view text, F&& body) {
    ParseResult<T> out;
    auto lexed = detail::lex(text);
    if (!lexed.diagnostics.empty()) {
        out.diagnostics = std::move(lexed.diagnostics);
        return out;
    }
    Parser p(std::move(lexed.tokens));
    try {
        out.value = body(p);
    } catch (const SyntaxError& e) {
        auto d = e.diag;
        d.span.begin = std::min(d.span.begin, text.size());
        d.span.end = std::min(std::max(d.span.end, d.span.begin), text.size());
        out.diagnostics.push_back(std::move(d));
    }
    return out;
}

} // namespace

ParseResult<SourceUnit> parse_unit(std::string_view text) {
    return run_parser<SourceUnit>(text, [](Parser& p) { return p.unit(); });
}

ParseResult<WorkflowDecl> parse_workflow(std::string_view text) {
    auto unit = parse_unit(text);
    ParseResult<WorkflowDecl> out;
    out.diagnostics = std::move(unit.diagnostics);
    if (!unit.ok()) return out;
    if (!unit.value->actions.empty()) {
        out.diagnostics.push_back(Diagnostic{Severity::error, "syntax",
                                             "action declarations belong in an actions file",
                                             unit.value->actions.front().span});
        return out;
    }
    if (unit.value->workflows.size() != 1) {
        SourceSpan span{0, 0, 1, 1};
        if (unit.value->workflows.size() > 1) span = unit.value->workflows[1].span;
        out.diagnostics.push_back(Diagnostic{Severity::error, "syntax",
                                             "expected exactly one workflow declaration", span});
        return out;
    }
    out.value = std::move(unit.value->workflows.front());
    return out;
}

ParseResult<std::vector<ActionDecl>> parse_actions(std::string_view text) {
    auto unit = parse_unit(text);
    ParseResult<std::vector<ActionDecl>> out;
    out.diagnostics = std::move(unit.diagnostics);
    if (!unit.ok()) return out;
    if (!unit.value->workflows.empty()) {
        out.diagnostics.push_back(Diagnostic{Severity::error, "syntax",
                                             "workflow declarations belong in a workflow file",
                                             unit.value->workflows.front().span});
        return out;
    }
    std::set<std::string> names;
    for (const auto& a : unit.value->actions) {
        if (!names.insert(a.name).second) {
            out.diagnostics.push_back(Diagnostic{Severity::error, "duplicate",
                                                 "duplicate action '" + a.name + "'", a.span});
            return out;
        }
    }
    out.value = std::move(unit.value->actions);
    return out;
}

ParseResult<Condition> parse_condition(std::string_view text) {
    return run_parser<Condition>(text, [](Parser& p) { return p.standalone_condition(); });
}

} // namespace mscflow
