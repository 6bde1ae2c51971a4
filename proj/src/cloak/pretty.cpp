#include "cloak/pretty.hpp"

#include <sstream>

namespace cloak {

namespace {

const char* owner_text(const OwnerAnnotation& a) {
    switch (a.kind) {
        case OwnerAnnKind::All: return "all";
        case OwnerAnnKind::Me: return "me";
        case OwnerAnnKind::Tee: return "tee";
        case OwnerAnnKind::Id: return a.name.c_str();
    }
    return "";
}

class Printer {
public:
    explicit Printer(std::ostream& os, int indent = 0) : os_(os), indent_(indent) {}

    void file(const SourceFile& f) {
        if (f.pragma_text) os_ << "pragma solidity " << *f.pragma_text << ";\n\n";
        bool first = true;
        for (const auto& c : f.contracts) {
            if (!first) os_ << '\n';
            first = false;
            contract(*c);
        }
    }

    void contract(const ContractDecl& c) {
        os_ << "contract " << c.name << " {\n";
        ++indent_;
        for (const auto& sv : c.state_vars) {
            line();
            decl(sv);
            os_ << ";\n";
        }
        for (const auto& f : c.functions) {
            os_ << '\n';
            function(*f);
        }
        --indent_;
        os_ << "}\n";
    }

    void function(const FunctionDecl& f) {
        line();
        os_ << "function " << f.name << '(';
        for (size_t i = 0; i < f.params.size(); ++i) {
            if (i) os_ << ", ";
            decl(f.params[i]);
        }
        os_ << ") " << (f.visibility == Visibility::Public ? "public" : "internal");
        if (!f.returns.empty()) {
            os_ << " returns (";
            for (size_t i = 0; i < f.returns.size(); ++i) {
                if (i) os_ << ", ";
                decl(f.returns[i]);
            }
            os_ << ')';
        }
        os_ << ' ';
        block(*f.body);
        os_ << '\n';
    }

    void type(const TypeName& t) {
        switch (t.kind) {
            case TypeKind::Uint: os_ << "uint"; break;
            case TypeKind::Bool: os_ << "bool"; break;
            case TypeKind::Address: os_ << "address"; break;
            case TypeKind::Mapping:
                os_ << "mapping(";
                type(*t.key);
                if (t.key_binding) os_ << " !" << *t.key_binding;
                os_ << " => ";
                type(*t.value);
                if (t.value_owner) os_ << " @" << owner_text(*t.value_owner);
                os_ << ')';
                break;
            case TypeKind::Array:
                type(*t.elem);
                os_ << '[';
                if (!t.dynamic)
                    os_ << t.fixed_size;
                else if (t.class_binding)
                    os_ << '!' << *t.class_binding;
                else if (t.elem_owner)
                    os_ << '@' << owner_text(*t.elem_owner);
                os_ << ']';
                break;
        }
    }

    void decl(const VarDecl& d) {
        type(d.type);
        if (d.owner) os_ << " @" << owner_text(*d.owner);
        os_ << ' ' << d.name;
    }

    void expr(const Expr& e, int parent_prec = 0) {
        int prec = precedence(e);
        bool paren = prec < parent_prec;
        if (paren) os_ << '(';
        emit(e);
        if (paren) os_ << ')';
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                line();
                block(static_cast<const BlockStmt&>(s));
                os_ << '\n';
                break;
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(s);
                line();
                var_decl_head(v);
                os_ << ";\n";
                break;
            }
            case StmtKind::Expr:
                line();
                expr(*static_cast<const ExprStmt&>(s).expr);
                os_ << ";\n";
                break;
            case StmtKind::If:
                line();
                if_chain(static_cast<const IfStmt&>(s));
                os_ << '\n';
                break;
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(s);
                line();
                os_ << "for (";
                if (f.init) {
                    if (f.init->kind == StmtKind::VarDecl)
                        var_decl_head(static_cast<const VarDeclStmt&>(*f.init));
                    else
                        expr(*static_cast<const ExprStmt&>(*f.init).expr);
                }
                os_ << "; ";
                if (f.cond) expr(*f.cond);
                os_ << "; ";
                if (f.update) expr(*f.update);
                os_ << ") ";
                body_of(*f.body);
                os_ << '\n';
                break;
            }
            case StmtKind::Return: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                line();
                os_ << "return";
                if (r.values.size() == 1) {
                    os_ << ' ';
                    expr(*r.values[0]);
                } else if (r.values.size() > 1) {
                    os_ << " (";
                    for (size_t i = 0; i < r.values.size(); ++i) {
                        if (i) os_ << ", ";
                        expr(*r.values[i]);
                    }
                    os_ << ')';
                }
                os_ << ";\n";
                break;
            }
        }
    }

private:
    std::ostream& os_;
    int indent_ = 0;

    void line() {
        for (int i = 0; i < indent_; ++i) os_ << "    ";
    }

    void var_decl_head(const VarDeclStmt& v) {
        decl(v.decl);
        if (v.init) {
            os_ << " = ";
            expr(*v.init);
        }
    }

    void block(const BlockStmt& b) {
        os_ << "{\n";
        ++indent_;
        for (const auto& s : b.statements) stmt(*s);
        --indent_;
        line();
        os_ << '}';
    }

    // `if`/`else if` chains stay flat.
    void if_chain(const IfStmt& i) {
        os_ << "if (";
        expr(*i.cond);
        os_ << ") ";
        body_of(*i.then_branch);
        if (i.else_branch) {
            os_ << " else ";
            if (i.else_branch->kind == StmtKind::If)
                if_chain(static_cast<const IfStmt&>(*i.else_branch));
            else
                body_of(*i.else_branch);
        }
    }

    // Statement used as a branch or loop body, without its own line()/newline.
    void body_of(const Stmt& s) {
        if (s.kind == StmtKind::Block) {
            block(static_cast<const BlockStmt&>(s));
            return;
        }
        // Wrap single statements in braces; keeps emission context-free.
        os_ << "{\n";
        ++indent_;
        stmt(s);
        --indent_;
        line();
        os_ << '}';
    }

    static int precedence(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Assign: return 1;
            case ExprKind::Binary:
                switch (static_cast<const BinaryExpr&>(e).op) {
                    case BinaryOp::Or: return 2;
                    case BinaryOp::And: return 3;
                    case BinaryOp::Eq:
                    case BinaryOp::Ne: return 4;
                    case BinaryOp::Lt:
                    case BinaryOp::Gt:
                    case BinaryOp::Le:
                    case BinaryOp::Ge: return 5;
                    case BinaryOp::Add:
                    case BinaryOp::Sub: return 6;
                    default: return 7;
                }
            case ExprKind::Unary: return 8;
            default: return 9;
        }
    }

    void emit(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal: {
                const auto& l = static_cast<const LiteralExpr&>(e);
                if (l.is_bool)
                    os_ << (l.bool_value ? "true" : "false");
                else
                    os_ << l.uint_text;
                break;
            }
            case ExprKind::Ident:
                os_ << static_cast<const IdentExpr&>(e).name;
                break;
            case ExprKind::Index: {
                const auto& x = static_cast<const IndexExpr&>(e);
                expr(*x.base, 9);
                os_ << '[';
                expr(*x.index);
                os_ << ']';
                break;
            }
            case ExprKind::MsgSender:
                os_ << "msg.sender";
                break;
            case ExprKind::Length:
                expr(*static_cast<const LengthExpr&>(e).base, 9);
                os_ << ".length";
                break;
            case ExprKind::Unary: {
                const auto& x = static_cast<const UnaryExpr&>(e);
                os_ << (x.op == UnaryOp::Not ? '!' : '-');
                expr(*x.operand, 8);
                break;
            }
            case ExprKind::Binary: {
                static const char* ops[] = {"+", "-", "*", "/", "%", "<", ">", "<=", ">=",
                                            "==", "!=", "&&", "||"};
                const auto& x = static_cast<const BinaryExpr&>(e);
                int prec = precedence(e);
                expr(*x.lhs, prec);
                os_ << ' ' << ops[static_cast<int>(x.op)] << ' ';
                // Left-associative; right child needs one level more.
                expr(*x.rhs, prec + 1);
                break;
            }
            case ExprKind::Assign: {
                static const char* ops[] = {"=", "+=", "-="};
                const auto& x = static_cast<const AssignExpr&>(e);
                expr(*x.target, 9);
                os_ << ' ' << ops[static_cast<int>(x.op)] << ' ';
                expr(*x.value, 1);
                break;
            }
            case ExprKind::IncDec: {
                const auto& x = static_cast<const IncDecExpr&>(e);
                expr(*x.target, 9);
                os_ << (x.increment ? "++" : "--");
                break;
            }
            case ExprKind::Reveal: {
                const auto& x = static_cast<const RevealExpr&>(e);
                os_ << "reveal(";
                expr(*x.value);
                os_ << ", " << owner_text(x.target) << ')';
                break;
            }
        }
    }
};

}  // namespace

std::string pretty_print(const SourceFile& f) {
    std::ostringstream os;
    Printer(os).file(f);
    return os.str();
}

std::string pretty_contract(const ContractDecl& c) {
    std::ostringstream os;
    Printer(os).contract(c);
    return os.str();
}

std::string pretty_function(const FunctionDecl& f, int indent) {
    std::ostringstream os;
    Printer(os, indent).function(f);
    return os.str();
}

std::string pretty_type(const TypeName& t) {
    std::ostringstream os;
    Printer(os).type(t);
    return os.str();
}

std::string pretty_expr(const Expr& e) {
    std::ostringstream os;
    Printer(os).expr(e);
    return os.str();
}

std::string bare_type(const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: return "uint";
        case TypeKind::Bool: return "bool";
        case TypeKind::Address: return "address";
        case TypeKind::Mapping:
            return "mapping(" + bare_type(*t.key) + "=>" + bare_type(*t.value) + ")";
        case TypeKind::Array:
            if (t.dynamic) return bare_type(*t.elem) + "[]";
            return bare_type(*t.elem) + "[" + std::to_string(t.fixed_size) + "]";
    }
    return "?";
}

}  // namespace cloak
