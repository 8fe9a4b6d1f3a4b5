#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mscflow/diagnostics.hpp"

namespace mscflow::detail {

enum class Tok {
    ident,
    integer,
    string,
    lparen,
    rparen,
    lbrace,
    rbrace,
    lbracket,
    rbracket,
    comma,
    colon,
    semicolon,
    assign,
    at,
    arrow,
    larrow,
    lt,
    le,
    eqeq,
    end,
};

const char* describe(Tok t) noexcept;

struct Token {
    Tok kind = Tok::end;
    std::string text; // identifier spelling, decoded string, or integer digits
    SourceSpan span;
};

struct LexResult {
    std::vector<Token> tokens;
    std::vector<Diagnostic> diagnostics;
};

/// Tokenizes DSL text. `//` comments and whitespace are skipped.
LexResult lex(std::string_view text);

} // namespace mscflow::detail
