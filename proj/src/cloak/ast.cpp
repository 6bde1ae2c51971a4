#include "cloak/ast.hpp"

#include <sstream>

namespace cloak {

TypeName TypeName::clone() const {
    TypeName t;
    t.kind = kind;
    t.span = span;
    if (key) t.key = std::make_unique<TypeName>(key->clone());
    t.key_binding = key_binding;
    t.key_binding_span = key_binding_span;
    if (value) t.value = std::make_unique<TypeName>(value->clone());
    t.value_owner = value_owner;
    if (elem) t.elem = std::make_unique<TypeName>(elem->clone());
    t.dynamic = dynamic;
    t.fixed_size = fixed_size;
    t.class_binding = class_binding;
    t.class_binding_span = class_binding_span;
    t.elem_owner = elem_owner;
    return t;
}

ExprPtr clone_expr(const Expr& e, NodeCounter& ids) {
    switch (e.kind) {
        case ExprKind::Literal: {
            const auto& l = static_cast<const LiteralExpr&>(e);
            auto n = std::make_unique<LiteralExpr>(ids.next(), e.span);
            n->is_bool = l.is_bool;
            n->bool_value = l.bool_value;
            n->uint_text = l.uint_text;
            return n;
        }
        case ExprKind::Ident: {
            const auto& i = static_cast<const IdentExpr&>(e);
            auto n = std::make_unique<IdentExpr>(ids.next(), e.span);
            n->name = i.name;
            return n;
        }
        case ExprKind::Index: {
            const auto& x = static_cast<const IndexExpr&>(e);
            auto n = std::make_unique<IndexExpr>(ids.next(), e.span);
            n->base = clone_expr(*x.base, ids);
            n->index = clone_expr(*x.index, ids);
            return n;
        }
        case ExprKind::MsgSender:
            return std::make_unique<MsgSenderExpr>(ids.next(), e.span);
        case ExprKind::Length: {
            const auto& x = static_cast<const LengthExpr&>(e);
            auto n = std::make_unique<LengthExpr>(ids.next(), e.span);
            n->base = clone_expr(*x.base, ids);
            return n;
        }
        case ExprKind::Unary: {
            const auto& x = static_cast<const UnaryExpr&>(e);
            auto n = std::make_unique<UnaryExpr>(ids.next(), e.span);
            n->op = x.op;
            n->operand = clone_expr(*x.operand, ids);
            return n;
        }
        case ExprKind::Binary: {
            const auto& x = static_cast<const BinaryExpr&>(e);
            auto n = std::make_unique<BinaryExpr>(ids.next(), e.span);
            n->op = x.op;
            n->lhs = clone_expr(*x.lhs, ids);
            n->rhs = clone_expr(*x.rhs, ids);
            return n;
        }
        case ExprKind::Assign: {
            const auto& x = static_cast<const AssignExpr&>(e);
            auto n = std::make_unique<AssignExpr>(ids.next(), e.span);
            n->op = x.op;
            n->target = clone_expr(*x.target, ids);
            n->value = clone_expr(*x.value, ids);
            return n;
        }
        case ExprKind::IncDec: {
            const auto& x = static_cast<const IncDecExpr&>(e);
            auto n = std::make_unique<IncDecExpr>(ids.next(), e.span);
            n->increment = x.increment;
            n->target = clone_expr(*x.target, ids);
            return n;
        }
        case ExprKind::Reveal: {
            const auto& x = static_cast<const RevealExpr&>(e);
            auto n = std::make_unique<RevealExpr>(ids.next(), e.span);
            n->value = clone_expr(*x.value, ids);
            n->target = x.target;
            return n;
        }
    }
    return nullptr;
}

VarDecl clone_decl(const VarDecl& d, NodeCounter& ids) {
    VarDecl n;
    n.id = ids.next();
    n.span = d.span;
    n.type = d.type.clone();
    n.owner = d.owner;
    n.name = d.name;
    n.name_span = d.name_span;
    return n;
}

StmtPtr clone_stmt(const Stmt& s, NodeCounter& ids) {
    switch (s.kind) {
        case StmtKind::Block: {
            const auto& b = static_cast<const BlockStmt&>(s);
            auto n = std::make_unique<BlockStmt>(ids.next(), s.span);
            for (const auto& st : b.statements) n->statements.push_back(clone_stmt(*st, ids));
            return n;
        }
        case StmtKind::VarDecl: {
            const auto& v = static_cast<const VarDeclStmt&>(s);
            auto n = std::make_unique<VarDeclStmt>(ids.next(), s.span);
            n->decl = clone_decl(v.decl, ids);
            if (v.init) n->init = clone_expr(*v.init, ids);
            return n;
        }
        case StmtKind::Expr: {
            const auto& x = static_cast<const ExprStmt&>(s);
            auto n = std::make_unique<ExprStmt>(ids.next(), s.span);
            n->expr = clone_expr(*x.expr, ids);
            return n;
        }
        case StmtKind::If: {
            const auto& i = static_cast<const IfStmt&>(s);
            auto n = std::make_unique<IfStmt>(ids.next(), s.span);
            n->cond = clone_expr(*i.cond, ids);
            n->then_branch = clone_stmt(*i.then_branch, ids);
            if (i.else_branch) n->else_branch = clone_stmt(*i.else_branch, ids);
            return n;
        }
        case StmtKind::For: {
            const auto& f = static_cast<const ForStmt&>(s);
            auto n = std::make_unique<ForStmt>(ids.next(), s.span);
            if (f.init) n->init = clone_stmt(*f.init, ids);
            if (f.cond) n->cond = clone_expr(*f.cond, ids);
            if (f.update) n->update = clone_expr(*f.update, ids);
            n->body = clone_stmt(*f.body, ids);
            return n;
        }
        case StmtKind::Return: {
            const auto& r = static_cast<const ReturnStmt&>(s);
            auto n = std::make_unique<ReturnStmt>(ids.next(), s.span);
            for (const auto& v : r.values) n->values.push_back(clone_expr(*v, ids));
            return n;
        }
    }
    return nullptr;
}

namespace {

void dump_owner(std::ostream& os, const OwnerAnnotation& a) {
    switch (a.kind) {
        case OwnerAnnKind::All: os << "@all"; break;
        case OwnerAnnKind::Me: os << "@me"; break;
        case OwnerAnnKind::Tee: os << "@tee"; break;
        case OwnerAnnKind::Id: os << '@' << a.name; break;
    }
}

void dump_type(std::ostream& os, const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: os << "uint"; break;
        case TypeKind::Bool: os << "bool"; break;
        case TypeKind::Address: os << "address"; break;
        case TypeKind::Mapping:
            os << "(mapping ";
            dump_type(os, *t.key);
            if (t.key_binding) os << " !" << *t.key_binding;
            os << ' ';
            dump_type(os, *t.value);
            if (t.value_owner) {
                os << ' ';
                dump_owner(os, *t.value_owner);
            }
            os << ')';
            break;
        case TypeKind::Array:
            os << "(array ";
            dump_type(os, *t.elem);
            if (!t.dynamic) os << ' ' << t.fixed_size;
            if (t.class_binding) os << " !" << *t.class_binding;
            if (t.elem_owner) {
                os << ' ';
                dump_owner(os, *t.elem_owner);
            }
            os << ')';
            break;
    }
}

void dump_expr_rec(std::ostream& os, const Expr& e) {
    switch (e.kind) {
        case ExprKind::Literal: {
            const auto& l = static_cast<const LiteralExpr&>(e);
            if (l.is_bool)
                os << (l.bool_value ? "true" : "false");
            else
                os << l.uint_text;
            break;
        }
        case ExprKind::Ident:
            os << static_cast<const IdentExpr&>(e).name;
            break;
        case ExprKind::Index: {
            const auto& x = static_cast<const IndexExpr&>(e);
            os << "(index ";
            dump_expr_rec(os, *x.base);
            os << ' ';
            dump_expr_rec(os, *x.index);
            os << ')';
            break;
        }
        case ExprKind::MsgSender:
            os << "msg.sender";
            break;
        case ExprKind::Length: {
            os << "(length ";
            dump_expr_rec(os, *static_cast<const LengthExpr&>(e).base);
            os << ')';
            break;
        }
        case ExprKind::Unary: {
            const auto& x = static_cast<const UnaryExpr&>(e);
            os << '(' << (x.op == UnaryOp::Not ? "!" : "neg") << ' ';
            dump_expr_rec(os, *x.operand);
            os << ')';
            break;
        }
        case ExprKind::Binary: {
            static const char* names[] = {"+", "-", "*", "/", "%", "<", ">", "<=", ">=", "==", "!=", "&&", "||"};
            const auto& x = static_cast<const BinaryExpr&>(e);
            os << '(' << names[static_cast<int>(x.op)] << ' ';
            dump_expr_rec(os, *x.lhs);
            os << ' ';
            dump_expr_rec(os, *x.rhs);
            os << ')';
            break;
        }
        case ExprKind::Assign: {
            static const char* names[] = {"=", "+=", "-="};
            const auto& x = static_cast<const AssignExpr&>(e);
            os << '(' << names[static_cast<int>(x.op)] << ' ';
            dump_expr_rec(os, *x.target);
            os << ' ';
            dump_expr_rec(os, *x.value);
            os << ')';
            break;
        }
        case ExprKind::IncDec: {
            const auto& x = static_cast<const IncDecExpr&>(e);
            os << '(' << (x.increment ? "++" : "--") << ' ';
            dump_expr_rec(os, *x.target);
            os << ')';
            break;
        }
        case ExprKind::Reveal: {
            const auto& x = static_cast<const RevealExpr&>(e);
            os << "(reveal ";
            dump_expr_rec(os, *x.value);
            os << ' ';
            dump_owner(os, x.target);
            os << ')';
            break;
        }
    }
}

void dump_decl(std::ostream& os, const VarDecl& d) {
    os << "(decl ";
    dump_type(os, d.type);
    if (d.owner) {
        os << ' ';
        dump_owner(os, *d.owner);
    }
    os << ' ' << d.name << ')';
}

void dump_stmt_rec(std::ostream& os, const Stmt& s) {
    switch (s.kind) {
        case StmtKind::Block: {
            const auto& b = static_cast<const BlockStmt&>(s);
            os << "(block";
            for (const auto& st : b.statements) {
                os << ' ';
                dump_stmt_rec(os, *st);
            }
            os << ')';
            break;
        }
        case StmtKind::VarDecl: {
            const auto& v = static_cast<const VarDeclStmt&>(s);
            os << "(var ";
            dump_decl(os, v.decl);
            if (v.init) {
                os << ' ';
                dump_expr_rec(os, *v.init);
            }
            os << ')';
            break;
        }
        case StmtKind::Expr:
            dump_expr_rec(os, *static_cast<const ExprStmt&>(s).expr);
            break;
        case StmtKind::If: {
            const auto& i = static_cast<const IfStmt&>(s);
            os << "(if ";
            dump_expr_rec(os, *i.cond);
            os << ' ';
            dump_stmt_rec(os, *i.then_branch);
            if (i.else_branch) {
                os << ' ';
                dump_stmt_rec(os, *i.else_branch);
            }
            os << ')';
            break;
        }
        case StmtKind::For: {
            const auto& f = static_cast<const ForStmt&>(s);
            os << "(for ";
            if (f.init) dump_stmt_rec(os, *f.init); else os << "_";
            os << ' ';
            if (f.cond) dump_expr_rec(os, *f.cond); else os << "_";
            os << ' ';
            if (f.update) dump_expr_rec(os, *f.update); else os << "_";
            os << ' ';
            dump_stmt_rec(os, *f.body);
            os << ')';
            break;
        }
        case StmtKind::Return: {
            const auto& r = static_cast<const ReturnStmt&>(s);
            os << "(return";
            for (const auto& v : r.values) {
                os << ' ';
                dump_expr_rec(os, *v);
            }
            os << ')';
            break;
        }
    }
}

}  // namespace

std::string dump_expr(const Expr& e) {
    std::ostringstream os;
    dump_expr_rec(os, e);
    return os.str();
}

std::string dump_stmt(const Stmt& s) {
    std::ostringstream os;
    dump_stmt_rec(os, s);
    return os.str();
}

std::string dump_contract(const ContractDecl& c) {
    std::ostringstream os;
    os << "(contract " << c.name;
    for (const auto& sv : c.state_vars) {
        os << ' ';
        dump_decl(os, sv);
    }
    for (const auto& f : c.functions) {
        os << " (function " << f->name << (f->visibility == Visibility::Public ? " public" : " internal");
        os << " (params";
        for (const auto& p : f->params) {
            os << ' ';
            dump_decl(os, p);
        }
        os << ") (returns";
        for (const auto& r : f->returns) {
            os << ' ';
            dump_decl(os, r);
        }
        os << ") ";
        dump_stmt_rec(os, *f->body);
        os << ')';
    }
    os << ')';
    return os.str();
}

std::string dump_source_file(const SourceFile& f) {
    std::string out;
    if (f.pragma_text) out += "(pragma " + *f.pragma_text + ")\n";
    for (const auto& c : f.contracts) {
        out += dump_contract(*c);
        out += '\n';
    }
    return out;
}

void for_each_expr(const Expr& e, const std::function<void(const Expr&)>& fn) {
    switch (e.kind) {
        case ExprKind::Literal:
        case ExprKind::Ident:
        case ExprKind::MsgSender:
            break;
        case ExprKind::Index: {
            const auto& x = static_cast<const IndexExpr&>(e);
            for_each_expr(*x.base, fn);
            for_each_expr(*x.index, fn);
            break;
        }
        case ExprKind::Length:
            for_each_expr(*static_cast<const LengthExpr&>(e).base, fn);
            break;
        case ExprKind::Unary:
            for_each_expr(*static_cast<const UnaryExpr&>(e).operand, fn);
            break;
        case ExprKind::Binary: {
            const auto& x = static_cast<const BinaryExpr&>(e);
            for_each_expr(*x.lhs, fn);
            for_each_expr(*x.rhs, fn);
            break;
        }
        case ExprKind::Assign: {
            const auto& x = static_cast<const AssignExpr&>(e);
            for_each_expr(*x.target, fn);
            for_each_expr(*x.value, fn);
            break;
        }
        case ExprKind::IncDec:
            for_each_expr(*static_cast<const IncDecExpr&>(e).target, fn);
            break;
        case ExprKind::Reveal:
            for_each_expr(*static_cast<const RevealExpr&>(e).value, fn);
            break;
    }
    fn(e);
}

void for_each_expr(const Stmt& s, const std::function<void(const Expr&)>& fn) {
    for_each_stmt(s, [&fn](const Stmt& st) {
        switch (st.kind) {
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(st);
                if (v.init) for_each_expr(*v.init, fn);
                break;
            }
            case StmtKind::Expr:
                for_each_expr(*static_cast<const ExprStmt&>(st).expr, fn);
                break;
            case StmtKind::If:
                for_each_expr(*static_cast<const IfStmt&>(st).cond, fn);
                break;
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(st);
                if (f.cond) for_each_expr(*f.cond, fn);
                if (f.update) for_each_expr(*f.update, fn);
                break;
            }
            case StmtKind::Return:
                for (const auto& v : static_cast<const ReturnStmt&>(st).values) for_each_expr(*v, fn);
                break;
            case StmtKind::Block:
                break;
        }
    });
}

void for_each_stmt(const Stmt& s, const std::function<void(const Stmt&)>& fn) {
    switch (s.kind) {
        case StmtKind::Block:
            for (const auto& st : static_cast<const BlockStmt&>(s).statements) for_each_stmt(*st, fn);
            break;
        case StmtKind::If: {
            const auto& i = static_cast<const IfStmt&>(s);
            for_each_stmt(*i.then_branch, fn);
            if (i.else_branch) for_each_stmt(*i.else_branch, fn);
            break;
        }
        case StmtKind::For: {
            const auto& f = static_cast<const ForStmt&>(s);
            if (f.init) for_each_stmt(*f.init, fn);
            for_each_stmt(*f.body, fn);
            break;
        }
        default:
            break;
    }
    fn(s);
}

}  // namespace cloak
