#include "lexer.hpp"

#include <cctype>

namespace mscflow::detail {

const char* describe(Tok t) noexcept {
    switch (t) {
    case Tok::ident: return "identifier";
    case Tok::integer: return "integer";
    case Tok::string: return "string";
    case Tok::lparen: return "'('";
    case Tok::rparen: return "')'";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::lbracket: return "'['";
    case Tok::rbracket: return "']'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::semicolon: return "';'";
    case Tok::assign: return "'='";
    case Tok::at: return "'@'";
    case Tok::arrow: return "'->'";
    case Tok::larrow: return "'<-'";
    case Tok::lt: return "'<'";
    case Tok::le: return "'<='";
    case Tok::eqeq: return "'=='";
    case Tok::end: return "end of input";
    }
    return "?";
}

namespace {

class Lexer {
public:
    explicit Lexer(std::string_view text) : src_(text) {}

    LexResult run() {
        LexResult out;
        while (true) {
            skip_trivia();
            if (pos_ >= src_.size()) {
                out.tokens.push_back(Token{Tok::end, {}, span_from(pos_, line_, col_)});
                break;
            }
            if (!next(out)) break;
        }
        return out;
    }

private:
    SourceSpan span_from(std::size_t begin, int line, int col) const {
        return SourceSpan{begin, pos_, line, col};
    }

    char peek(std::size_t k = 0) const {
        return pos_ + k < src_.size() ? src_[pos_ + k] : '\0';
    }

    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < src_.size()) {
            char c = peek();
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (pos_ < src_.size() && peek() != '\n') advance();
            } else {
                break;
            }
        }
    }

    bool next(LexResult& out) {
        std::size_t begin = pos_;
        int line = line_, col = col_;
        char c = peek();
        auto emit = [&](Tok t, std::string text = {}) {
            out.tokens.push_back(Token{t, std::move(text), span_from(begin, line, col)});
        };
        auto fail = [&](std::string msg) {
            if (pos_ == begin) advance();
            out.diagnostics.push_back(
                Diagnostic{Severity::error, "lexical", std::move(msg), span_from(begin, line, col)});
            return false;
        };

        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') {
                id += peek();
                advance();
            }
            emit(Tok::ident, std::move(id));
            return true;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '-' && std::isdigit(static_cast<unsigned char>(peek(1))))) {
            std::string digits;
            if (c == '-') {
                digits += '-';
                advance();
            }
            while (std::isdigit(static_cast<unsigned char>(peek()))) {
                digits += peek();
                advance();
            }
            emit(Tok::integer, std::move(digits));
            return true;
        }
        if (c == '"') {
            advance();
            std::string s;
            while (true) {
                if (pos_ >= src_.size()) return fail("unterminated string literal");
                char d = peek();
                if (d == '"') {
                    advance();
                    break;
                }
                if (d == '\\') {
                    advance();
                    if (pos_ >= src_.size()) return fail("unterminated string literal");
                    char e = peek();
                    switch (e) {
                    case 'n': s += '\n'; break;
                    case 't': s += '\t'; break;
                    case 'r': s += '\r'; break;
                    case '"': s += '"'; break;
                    case '\\': s += '\\'; break;
                    default: return fail(std::string("unknown escape sequence '\\") + e + "'");
                    }
                    advance();
                    continue;
                }
                s += d;
                advance();
            }
            emit(Tok::string, std::move(s));
            return true;
        }

        auto two = [&](Tok t) {
            advance();
            advance();
            emit(t);
            return true;
        };
        auto one = [&](Tok t) {
            advance();
            emit(t);
            return true;
        };
        switch (c) {
        case '-':
            if (peek(1) == '>') return two(Tok::arrow);
            break;
        case '<':
            if (peek(1) == '-') return two(Tok::larrow);
            if (peek(1) == '=') return two(Tok::le);
            return one(Tok::lt);
        case '=':
            if (peek(1) == '=') return two(Tok::eqeq);
            return one(Tok::assign);
        case '(': return one(Tok::lparen);
        case ')': return one(Tok::rparen);
        case '{': return one(Tok::lbrace);
        case '}': return one(Tok::rbrace);
        case '[': return one(Tok::lbracket);
        case ']': return one(Tok::rbracket);
        case ',': return one(Tok::comma);
        case ':': return one(Tok::colon);
        case ';': return one(Tok::semicolon);
        case '@': return one(Tok::at);
        default: break;
        }
        return fail(std::string("unexpected character '") + c + "'");
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

LexResult lex(std::string_view text) { return Lexer(text).run(); }

} // namespace mscflow::detail
