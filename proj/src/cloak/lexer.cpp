#include "cloak/lexer.hpp"

#include <cctype>
#include <unordered_map>

namespace cloak {

namespace {

const std::unordered_map<std::string_view, Tok>& keywords() {
    static const std::unordered_map<std::string_view, Tok> kw = {
        {"pragma", Tok::KwPragma},   {"solidity", Tok::KwSolidity},
        {"contract", Tok::KwContract}, {"function", Tok::KwFunction},
        {"returns", Tok::KwReturns}, {"public", Tok::KwPublic},
        {"internal", Tok::KwInternal}, {"mapping", Tok::KwMapping},
        {"uint", Tok::KwUint},       {"uint256", Tok::KwUint},
        {"bool", Tok::KwBool},       {"address", Tok::KwAddress},
        {"if", Tok::KwIf},           {"else", Tok::KwElse},
        {"for", Tok::KwFor},         {"return", Tok::KwReturn},
        {"true", Tok::KwTrue},       {"false", Tok::KwFalse},
        {"reveal", Tok::KwReveal},   {"msg", Tok::KwMsg},
    };
    return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_cont(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> lex(const SourceBuffer& src, std::vector<Diagnostic>& diags) {
    const std::string& s = src.text();
    std::vector<Token> out;
    uint32_t i = 0;
    const uint32_t n = static_cast<uint32_t>(s.size());

    auto push = [&](Tok k, uint32_t begin, uint32_t end) { out.push_back({k, {begin, end}, {}}); };

    while (i < n) {
        char c = s[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && s[i + 1] == '/') {
            while (i < n && s[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < n && s[i + 1] == '*') {
            uint32_t begin = i;
            i += 2;
            while (i + 1 < n && !(s[i] == '*' && s[i + 1] == '/')) ++i;
            if (i + 1 >= n) {
                diags.push_back(Diagnostic::error(diag_code::parse, "unterminated block comment", {begin, n}));
                i = n;
            } else {
                i += 2;
            }
            continue;
        }
        uint32_t begin = i;
        if (ident_start(c)) {
            while (i < n && ident_cont(s[i])) ++i;
            std::string_view word(s.data() + begin, i - begin);
            auto it = keywords().find(word);
            if (it != keywords().end()) {
                push(it->second, begin, i);
            } else {
                out.push_back({Tok::Ident, {begin, i}, std::string(word)});
            }
            continue;
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i < n && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i < n && ident_start(s[i])) {
                while (i < n && ident_cont(s[i])) ++i;
                diags.push_back(Diagnostic::error(diag_code::parse, "malformed number", {begin, i}));
                continue;
            }
            out.push_back({Tok::Number, {begin, i}, s.substr(begin, i - begin)});
            continue;
        }
        auto two = [&](char a, char b) { return c == a && i + 1 < n && s[i + 1] == b; };
        if (two('=', '>')) { push(Tok::Arrow, begin, i += 2); continue; }
        if (two('=', '=')) { push(Tok::EqEq, begin, i += 2); continue; }
        if (two('!', '=')) { push(Tok::BangEq, begin, i += 2); continue; }
        if (two('<', '=')) { push(Tok::Le, begin, i += 2); continue; }
        if (two('>', '=')) { push(Tok::Ge, begin, i += 2); continue; }
        if (two('+', '=')) { push(Tok::PlusAssign, begin, i += 2); continue; }
        if (two('-', '=')) { push(Tok::MinusAssign, begin, i += 2); continue; }
        if (two('+', '+')) { push(Tok::PlusPlus, begin, i += 2); continue; }
        if (two('-', '-')) { push(Tok::MinusMinus, begin, i += 2); continue; }
        if (two('&', '&')) { push(Tok::AmpAmp, begin, i += 2); continue; }
        if (two('|', '|')) { push(Tok::PipePipe, begin, i += 2); continue; }
        switch (c) {
            case '{': push(Tok::LBrace, begin, ++i); continue;
            case '}': push(Tok::RBrace, begin, ++i); continue;
            case '(': push(Tok::LParen, begin, ++i); continue;
            case ')': push(Tok::RParen, begin, ++i); continue;
            case '[': push(Tok::LBracket, begin, ++i); continue;
            case ']': push(Tok::RBracket, begin, ++i); continue;
            case ';': push(Tok::Semicolon, begin, ++i); continue;
            case ',': push(Tok::Comma, begin, ++i); continue;
            case '.': push(Tok::Dot, begin, ++i); continue;
            case '@': push(Tok::At, begin, ++i); continue;
            case '!': push(Tok::Bang, begin, ++i); continue;
            case '=': push(Tok::Assign, begin, ++i); continue;
            case '+': push(Tok::Plus, begin, ++i); continue;
            case '-': push(Tok::Minus, begin, ++i); continue;
            case '*': push(Tok::Star, begin, ++i); continue;
            case '/': push(Tok::Slash, begin, ++i); continue;
            case '%': push(Tok::Percent, begin, ++i); continue;
            case '<': push(Tok::Lt, begin, ++i); continue;
            case '>': push(Tok::Gt, begin, ++i); continue;
            default:
                diags.push_back(Diagnostic::error(
                    diag_code::parse, std::string("unexpected character '") + c + "'", {begin, begin + 1}));
                ++i;
                continue;
        }
    }
    out.push_back({Tok::Eof, {n, n}, {}});
    return out;
}

const char* token_name(Tok k) {
    switch (k) {
        case Tok::Eof: return "end of input";
        case Tok::Ident: return "identifier";
        case Tok::Number: return "number";
        case Tok::KwPragma: return "'pragma'";
        case Tok::KwSolidity: return "'solidity'";
        case Tok::KwContract: return "'contract'";
        case Tok::KwFunction: return "'function'";
        case Tok::KwReturns: return "'returns'";
        case Tok::KwPublic: return "'public'";
        case Tok::KwInternal: return "'internal'";
        case Tok::KwMapping: return "'mapping'";
        case Tok::KwUint: return "'uint'";
        case Tok::KwBool: return "'bool'";
        case Tok::KwAddress: return "'address'";
        case Tok::KwIf: return "'if'";
        case Tok::KwElse: return "'else'";
        case Tok::KwFor: return "'for'";
        case Tok::KwReturn: return "'return'";
        case Tok::KwTrue: return "'true'";
        case Tok::KwFalse: return "'false'";
        case Tok::KwReveal: return "'reveal'";
        case Tok::KwMsg: return "'msg'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Semicolon: return "';'";
        case Tok::Comma: return "','";
        case Tok::Dot: return "'.'";
        case Tok::Arrow: return "'=>'";
        case Tok::At: return "'@'";
        case Tok::Bang: return "'!'";
        case Tok::Assign: return "'='";
        case Tok::PlusAssign: return "'+='";
        case Tok::MinusAssign: return "'-='";
        case Tok::PlusPlus: return "'++'";
        case Tok::MinusMinus: return "'--'";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Lt: return "'<'";
        case Tok::Gt: return "'>'";
        case Tok::Le: return "'<='";
        case Tok::Ge: return "'>='";
        case Tok::EqEq: return "'=='";
        case Tok::BangEq: return "'!='";
        case Tok::AmpAmp: return "'&&'";
        case Tok::PipePipe: return "'||'";
    }
    return "?";
}

}  // namespace cloak
