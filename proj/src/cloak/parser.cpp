#include "cloak/parser.hpp"

#include <cassert>

#include "cloak/lexer.hpp"

namespace cloak {

namespace {

// 2^256 - 1, for literal range validation.
constexpr std::string_view kMaxUintDec =
    "115792089237316195423570985008687907853269984665640564039457584007913129639935";

bool literal_fits_uint256(std::string_view digits) {
    size_t i = 0;
    while (i + 1 < digits.size() && digits[i] == '0') ++i;
    std::string_view d = digits.substr(i);
    if (d.size() != kMaxUintDec.size()) return d.size() < kMaxUintDec.size();
    return d <= kMaxUintDec;
}

std::string canonical_decimal(std::string_view digits) {
    size_t i = 0;
    while (i + 1 < digits.size() && digits[i] == '0') ++i;
    return std::string(digits.substr(i));
}

struct ParseAbort {};

class Parser {
public:
    Parser(SourceBuffer buffer) : buf_(std::move(buffer)) {}

    SourceFile run() {
        SourceFile out;
        toks_ = lex(buf_, diags_);
        if (has_errors(diags_)) {
            out.buffer = std::move(buf_);
            out.diagnostics = std::move(diags_);
            return out;
        }
        try {
            while (at(Tok::KwPragma)) parse_pragma(out);
            while (!at(Tok::Eof)) out.contracts.push_back(parse_contract());
        } catch (const ParseAbort&) {
            out.contracts.clear();
            out.pragma_text.reset();
        }
        out.buffer = std::move(buf_);
        out.diagnostics = std::move(diags_);
        return out;
    }

private:
    SourceBuffer buf_;
    std::vector<Token> toks_;
    size_t pos_ = 0;
    NodeCounter ids_;
    std::vector<Diagnostic> diags_;

    const Token& cur() const { return toks_[pos_]; }
    const Token& peek(size_t n = 1) const {
        size_t i = pos_ + n;
        return toks_[i < toks_.size() ? i : toks_.size() - 1];
    }
    bool at(Tok k) const { return cur().kind == k; }
    Token advance() { return toks_[pos_++]; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++pos_;
        return true;
    }

    [[noreturn]] void fail(std::string msg, Span span, const char* code = diag_code::parse) {
        diags_.push_back(Diagnostic::error(code, std::move(msg), span));
        throw ParseAbort{};
    }

    Token expect(Tok k, const char* what) {
        if (!at(k)) fail(std::string("expected ") + what + ", found " + token_name(cur().kind), cur().span);
        return advance();
    }

    // ---- top level ----------------------------------------------------------

    void parse_pragma(SourceFile& out) {
        expect(Tok::KwPragma, "'pragma'");
        Token sol = expect(Tok::KwSolidity, "'solidity'");
        uint32_t begin = sol.span.end;
        while (!at(Tok::Semicolon)) {
            if (at(Tok::Eof)) fail("expected ';' to end pragma", cur().span);
            advance();
        }
        uint32_t end = cur().span.begin;
        advance();  // ';'
        std::string_view raw = buf_.slice({begin, end});
        size_t a = raw.find_first_not_of(" \t\r\n");
        size_t b = raw.find_last_not_of(" \t\r\n");
        out.pragma_text = a == std::string_view::npos ? std::string() : std::string(raw.substr(a, b - a + 1));
    }

    std::unique_ptr<ContractDecl> parse_contract() {
        Token kw = expect(Tok::KwContract, "'contract'");
        auto c = std::make_unique<ContractDecl>();
        c->id = ids_.next();
        Token name = expect(Tok::Ident, "contract name");
        c->name = name.text;
        c->name_span = name.span;
        expect(Tok::LBrace, "'{'");
        while (!at(Tok::RBrace)) {
            if (at(Tok::Eof)) fail("unterminated contract body", cur().span);
            if (at(Tok::KwFunction)) {
                c->functions.push_back(parse_function());
            } else {
                VarDecl d = parse_var_decl();
                if (at(Tok::Assign))
                    fail("state variable initializers are not supported", cur().span,
                         diag_code::unsupported_construct);
                expect(Tok::Semicolon, "';'");
                c->state_vars.push_back(std::move(d));
            }
        }
        Token rb = advance();
        c->span = Span::join(kw.span, rb.span);
        return c;
    }

    std::unique_ptr<FunctionDecl> parse_function() {
        Token kw = expect(Tok::KwFunction, "'function'");
        auto f = std::make_unique<FunctionDecl>();
        f->id = ids_.next();
        Token name = expect(Tok::Ident, "function name");
        f->name = name.text;
        f->name_span = name.span;
        expect(Tok::LParen, "'('");
        if (!at(Tok::RParen)) {
            do {
                f->params.push_back(parse_var_decl());
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        if (accept(Tok::KwPublic))
            f->visibility = Visibility::Public;
        else if (accept(Tok::KwInternal))
            f->visibility = Visibility::Internal;
        if (accept(Tok::KwReturns)) {
            expect(Tok::LParen, "'('");
            do {
                f->returns.push_back(parse_var_decl());
            } while (accept(Tok::Comma));
            expect(Tok::RParen, "')'");
        }
        f->body = parse_block();
        f->span = Span::join(kw.span, f->body->span);
        return f;
    }

    // ---- declarations --------------------------------------------------------

    bool at_type_start() const {
        return at(Tok::KwUint) || at(Tok::KwBool) || at(Tok::KwAddress) || at(Tok::KwMapping);
    }

    OwnerAnnotation parse_annotation() {
        Token atTok = expect(Tok::At, "'@'");
        if (!at(Tok::Ident))
            fail("expected owner name after '@'", atTok.span, diag_code::annotation_syntax);
        Token name = advance();
        OwnerAnnotation a;
        a.span = Span::join(atTok.span, name.span);
        if (name.text == "all")
            a.kind = OwnerAnnKind::All;
        else if (name.text == "me")
            a.kind = OwnerAnnKind::Me;
        else if (name.text == "tee")
            a.kind = OwnerAnnKind::Tee;
        else {
            a.kind = OwnerAnnKind::Id;
            a.name = name.text;
        }
        return a;
    }

    TypeName parse_scalar_type() {
        TypeName t;
        Token tok = advance();
        t.span = tok.span;
        switch (tok.kind) {
            case Tok::KwUint: t.kind = TypeKind::Uint; break;
            case Tok::KwBool: t.kind = TypeKind::Bool; break;
            case Tok::KwAddress: t.kind = TypeKind::Address; break;
            default: fail("expected type name", tok.span);
        }
        return t;
    }

    TypeName parse_type() {
        TypeName base;
        if (at(Tok::KwMapping)) {
            Token kw = advance();
            base.kind = TypeKind::Mapping;
            expect(Tok::LParen, "'('");
            if (!at(Tok::KwUint) && !at(Tok::KwAddress))
                fail("mapping key must be uint or address", cur().span, diag_code::unsupported_construct);
            base.key = std::make_unique<TypeName>(parse_scalar_type());
            if (at(Tok::Bang)) {
                Token bang = advance();
                Token b = expect(Tok::Ident, "key binding name");
                base.key_binding = b.text;
                base.key_binding_span = Span::join(bang.span, b.span);
            }
            expect(Tok::Arrow, "'=>'");
            base.value = std::make_unique<TypeName>(parse_type());
            if (at(Tok::At)) base.value_owner = parse_annotation();
            Token rp = expect(Tok::RParen, "')'");
            base.span = Span::join(kw.span, rp.span);
        } else {
            base = parse_scalar_type();
        }
        while (at(Tok::LBracket)) {
            Token lb = advance();
            TypeName arr;
            arr.kind = TypeKind::Array;
            arr.elem = std::make_unique<TypeName>(std::move(base));
            if (at(Tok::Number)) {
                Token n = advance();
                arr.dynamic = false;
                try {
                    arr.fixed_size = std::stoull(n.text);
                } catch (...) {
                    fail("array size out of range", n.span);
                }
                if (arr.fixed_size == 0) fail("array size must be positive", n.span);
            } else if (at(Tok::Bang)) {
                Token bang = advance();
                Token b = expect(Tok::Ident, "party-class binding name");
                arr.class_binding = b.text;
                arr.class_binding_span = Span::join(bang.span, b.span);
            } else if (at(Tok::At)) {
                arr.elem_owner = parse_annotation();
            }
            Token rb = expect(Tok::RBracket, "']'");
            arr.span = Span::join(arr.elem->span, Span::join(lb.span, rb.span));
            base = std::move(arr);
        }
        return base;
    }

    VarDecl parse_var_decl() {
        VarDecl d;
        d.id = ids_.next();
        d.type = parse_type();
        if (at(Tok::At)) {
            OwnerAnnotation a = parse_annotation();
            if (!d.type.is_scalar())
                fail("owner annotation is only allowed on scalar declarations", a.span,
                     diag_code::annotation_syntax);
            d.owner = a;
        }
        if (!at(Tok::Ident)) {
            if (d.owner)
                fail("expected variable name after owner annotation", d.owner->span,
                     diag_code::annotation_syntax);
            fail(std::string("expected variable name, found ") + token_name(cur().kind), cur().span);
        }
        Token name = advance();
        d.name = name.text;
        d.name_span = name.span;
        d.span = Span::join(d.type.span, name.span);
        return d;
    }

    // ---- statements ----------------------------------------------------------

    std::unique_ptr<BlockStmt> parse_block() {
        Token lb = expect(Tok::LBrace, "'{'");
        auto b = std::make_unique<BlockStmt>(ids_.next(), lb.span);
        while (!at(Tok::RBrace)) {
            if (at(Tok::Eof)) fail("unterminated block", cur().span);
            b->statements.push_back(parse_stmt());
        }
        Token rb = advance();
        b->span = Span::join(lb.span, rb.span);
        return b;
    }

    StmtPtr parse_stmt() {
        if (at(Tok::LBrace)) return parse_block();
        if (at(Tok::KwIf)) return parse_if();
        if (at(Tok::KwFor)) return parse_for();
        if (at(Tok::KwReturn)) return parse_return();
        if (at_type_start()) {
            StmtPtr s = parse_var_decl_stmt();
            expect(Tok::Semicolon, "';'");
            return s;
        }
        auto s = std::make_unique<ExprStmt>(ids_.next(), cur().span);
        s->expr = parse_expr();
        Token semi = expect(Tok::Semicolon, "';'");
        s->span = Span::join(s->expr->span, semi.span);
        return s;
    }

    StmtPtr parse_var_decl_stmt() {
        auto s = std::make_unique<VarDeclStmt>(ids_.next(), cur().span);
        s->decl = parse_var_decl();
        s->span = s->decl.span;
        if (accept(Tok::Assign)) {
            s->init = parse_expr();
            s->span = Span::join(s->span, s->init->span);
        }
        return s;
    }

    StmtPtr parse_if() {
        Token kw = advance();
        auto s = std::make_unique<IfStmt>(ids_.next(), kw.span);
        expect(Tok::LParen, "'('");
        s->cond = parse_expr();
        expect(Tok::RParen, "')'");
        s->then_branch = parse_stmt();
        s->span = Span::join(kw.span, s->then_branch->span);
        if (accept(Tok::KwElse)) {
            s->else_branch = parse_stmt();
            s->span = Span::join(s->span, s->else_branch->span);
        }
        return s;
    }

    StmtPtr parse_for() {
        Token kw = advance();
        auto s = std::make_unique<ForStmt>(ids_.next(), kw.span);
        expect(Tok::LParen, "'('");
        if (!accept(Tok::Semicolon)) {
            if (at_type_start()) {
                s->init = parse_var_decl_stmt();
            } else {
                auto e = std::make_unique<ExprStmt>(ids_.next(), cur().span);
                e->expr = parse_expr();
                e->span = e->expr->span;
                s->init = std::move(e);
            }
            expect(Tok::Semicolon, "';'");
        }
        if (!at(Tok::Semicolon)) s->cond = parse_expr();
        expect(Tok::Semicolon, "';'");
        if (!at(Tok::RParen)) s->update = parse_expr();
        expect(Tok::RParen, "')'");
        s->body = parse_stmt();
        s->span = Span::join(kw.span, s->body->span);
        return s;
    }

    StmtPtr parse_return() {
        Token kw = advance();
        auto s = std::make_unique<ReturnStmt>(ids_.next(), kw.span);
        if (!at(Tok::Semicolon)) {
            // `return (a, b);` is a tuple; `return (a + b);` is a parenthesized
            // expression. Probe and rewind when the parenthesis is not a tuple.
            bool tuple = false;
            if (at(Tok::LParen)) {
                size_t saved = pos_;
                advance();
                s->values.push_back(parse_expr());
                if (at(Tok::Comma)) {
                    tuple = true;
                    while (accept(Tok::Comma)) s->values.push_back(parse_expr());
                    expect(Tok::RParen, "')'");
                } else {
                    s->values.clear();
                    pos_ = saved;
                }
            }
            if (!tuple) s->values.push_back(parse_expr());
        }
        Token semi = expect(Tok::Semicolon, "';'");
        s->span = Span::join(kw.span, semi.span);
        return s;
    }

    // ---- expressions ---------------------------------------------------------

    ExprPtr parse_expr() { return parse_assignment(); }

    ExprPtr parse_assignment() {
        ExprPtr lhs = parse_or();
        AssignOp op;
        if (at(Tok::Assign))
            op = AssignOp::Assign;
        else if (at(Tok::PlusAssign))
            op = AssignOp::AddAssign;
        else if (at(Tok::MinusAssign))
            op = AssignOp::SubAssign;
        else
            return lhs;
        advance();
        auto a = std::make_unique<AssignExpr>(ids_.next(), lhs->span);
        a->op = op;
        a->target = std::move(lhs);
        a->value = parse_assignment();
        a->span = Span::join(a->target->span, a->value->span);
        return a;
    }

    ExprPtr make_binary(BinaryOp op, ExprPtr l, ExprPtr r) {
        auto b = std::make_unique<BinaryExpr>(ids_.next(), Span::join(l->span, r->span));
        b->op = op;
        b->lhs = std::move(l);
        b->rhs = std::move(r);
        return b;
    }

    ExprPtr parse_or() {
        ExprPtr e = parse_and();
        while (accept(Tok::PipePipe)) e = make_binary(BinaryOp::Or, std::move(e), parse_and());
        return e;
    }

    ExprPtr parse_and() {
        ExprPtr e = parse_equality();
        while (accept(Tok::AmpAmp)) e = make_binary(BinaryOp::And, std::move(e), parse_equality());
        return e;
    }

    ExprPtr parse_equality() {
        ExprPtr e = parse_relational();
        while (true) {
            if (accept(Tok::EqEq))
                e = make_binary(BinaryOp::Eq, std::move(e), parse_relational());
            else if (accept(Tok::BangEq))
                e = make_binary(BinaryOp::Ne, std::move(e), parse_relational());
            else
                return e;
        }
    }

    ExprPtr parse_relational() {
        ExprPtr e = parse_additive();
        while (true) {
            if (accept(Tok::Lt))
                e = make_binary(BinaryOp::Lt, std::move(e), parse_additive());
            else if (accept(Tok::Gt))
                e = make_binary(BinaryOp::Gt, std::move(e), parse_additive());
            else if (accept(Tok::Le))
                e = make_binary(BinaryOp::Le, std::move(e), parse_additive());
            else if (accept(Tok::Ge))
                e = make_binary(BinaryOp::Ge, std::move(e), parse_additive());
            else
                return e;
        }
    }

    ExprPtr parse_additive() {
        ExprPtr e = parse_multiplicative();
        while (true) {
            if (accept(Tok::Plus))
                e = make_binary(BinaryOp::Add, std::move(e), parse_multiplicative());
            else if (accept(Tok::Minus))
                e = make_binary(BinaryOp::Sub, std::move(e), parse_multiplicative());
            else
                return e;
        }
    }

    ExprPtr parse_multiplicative() {
        ExprPtr e = parse_unary();
        while (true) {
            if (accept(Tok::Star))
                e = make_binary(BinaryOp::Mul, std::move(e), parse_unary());
            else if (accept(Tok::Slash))
                e = make_binary(BinaryOp::Div, std::move(e), parse_unary());
            else if (accept(Tok::Percent))
                e = make_binary(BinaryOp::Mod, std::move(e), parse_unary());
            else
                return e;
        }
    }

    ExprPtr parse_unary() {
        if (at(Tok::Bang) || at(Tok::Minus)) {
            Token op = advance();
            auto u = std::make_unique<UnaryExpr>(ids_.next(), op.span);
            u->op = op.kind == Tok::Bang ? UnaryOp::Not : UnaryOp::Neg;
            u->operand = parse_unary();
            u->span = Span::join(op.span, u->operand->span);
            return u;
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_primary();
        while (true) {
            if (at(Tok::LBracket)) {
                advance();
                auto x = std::make_unique<IndexExpr>(ids_.next(), e->span);
                x->base = std::move(e);
                x->index = parse_expr();
                Token rb = expect(Tok::RBracket, "']'");
                x->span = Span::join(x->base->span, rb.span);
                e = std::move(x);
            } else if (at(Tok::Dot)) {
                advance();
                Token m = expect(Tok::Ident, "member name");
                if (m.text != "length")
                    fail("only '.length' member access is supported", m.span,
                         diag_code::unsupported_construct);
                auto x = std::make_unique<LengthExpr>(ids_.next(), e->span);
                x->base = std::move(e);
                x->span = Span::join(x->base->span, m.span);
                e = std::move(x);
            } else if (at(Tok::PlusPlus) || at(Tok::MinusMinus)) {
                Token op = advance();
                auto x = std::make_unique<IncDecExpr>(ids_.next(), e->span);
                x->increment = op.kind == Tok::PlusPlus;
                x->target = std::move(e);
                x->span = Span::join(x->target->span, op.span);
                return x;  // ++/-- does not chain
            } else {
                return e;
            }
        }
    }

    ExprPtr parse_primary() {
        if (at(Tok::Number)) {
            Token n = advance();
            if (!literal_fits_uint256(n.text))
                fail("integer literal does not fit in 256 bits", n.span);
            auto l = std::make_unique<LiteralExpr>(ids_.next(), n.span);
            l->uint_text = canonical_decimal(n.text);
            return l;
        }
        if (at(Tok::KwTrue) || at(Tok::KwFalse)) {
            Token t = advance();
            auto l = std::make_unique<LiteralExpr>(ids_.next(), t.span);
            l->is_bool = true;
            l->bool_value = t.kind == Tok::KwTrue;
            return l;
        }
        if (at(Tok::Ident)) {
            Token t = advance();
            auto i = std::make_unique<IdentExpr>(ids_.next(), t.span);
            i->name = t.text;
            return i;
        }
        if (at(Tok::KwMsg)) {
            Token t = advance();
            expect(Tok::Dot, "'.'");
            Token m = expect(Tok::Ident, "'sender'");
            if (m.text != "sender")
                fail("only 'msg.sender' is supported", m.span, diag_code::unsupported_construct);
            return std::make_unique<MsgSenderExpr>(ids_.next(), Span::join(t.span, m.span));
        }
        if (at(Tok::KwReveal)) {
            Token kw = advance();
            expect(Tok::LParen, "'('");
            auto r = std::make_unique<RevealExpr>(ids_.next(), kw.span);
            r->value = parse_expr();
            expect(Tok::Comma, "','");
            if (!at(Tok::Ident))
                fail("reveal target must be all, tee, or an address identifier", cur().span,
                     diag_code::annotation_syntax);
            Token o = advance();
            r->target.span = o.span;
            if (o.text == "all")
                r->target.kind = OwnerAnnKind::All;
            else if (o.text == "tee")
                r->target.kind = OwnerAnnKind::Tee;
            else if (o.text == "me")
                fail("reveal target must be all, tee, or an address identifier", o.span,
                     diag_code::annotation_syntax);
            else {
                r->target.kind = OwnerAnnKind::Id;
                r->target.name = o.text;
            }
            Token rp = expect(Tok::RParen, "')'");
            r->span = Span::join(kw.span, rp.span);
            return r;
        }
        if (at(Tok::LParen)) {
            advance();
            ExprPtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (at(Tok::At))
            fail("owner annotation is not allowed in an expression", cur().span,
                 diag_code::annotation_syntax);
        fail(std::string("expected expression, found ") + token_name(cur().kind), cur().span);
    }
};

}  // namespace

SourceFile parse_source(SourceBuffer buffer) {
    Parser p(std::move(buffer));
    return p.run();
}

SourceFile parse_source(std::string path, std::string text) {
    return parse_source(SourceBuffer(std::move(path), std::move(text)));
}

}  // namespace cloak
