#pragma once

#include <string>
#include <vector>

#include "cloak/diag.hpp"
#include "cloak/source.hpp"

namespace cloak {

enum class Tok {
    Eof,
    Ident,
    Number,
    // keywords
    KwPragma, KwSolidity, KwContract, KwFunction, KwReturns, KwPublic, KwInternal,
    KwMapping, KwUint, KwBool, KwAddress, KwIf, KwElse, KwFor, KwReturn,
    KwTrue, KwFalse, KwReveal, KwMsg,
    // punctuation and operators
    LBrace, RBrace, LParen, RParen, LBracket, RBracket,
    Semicolon, Comma, Dot, Arrow,  // =>
    At, Bang,
    Assign, PlusAssign, MinusAssign, PlusPlus, MinusMinus,
    Plus, Minus, Star, Slash, Percent,
    Lt, Gt, Le, Ge, EqEq, BangEq, AmpAmp, PipePipe,
};

struct Token {
    Tok kind = Tok::Eof;
    Span span;
    std::string text;  // Ident and Number only
};

// Tokenizes the whole buffer. Lexical errors (stray characters, unterminated
// comments, malformed numbers) are reported and the offending byte skipped.
std::vector<Token> lex(const SourceBuffer& src, std::vector<Diagnostic>& diags);

const char* token_name(Tok k);

}  // namespace cloak
