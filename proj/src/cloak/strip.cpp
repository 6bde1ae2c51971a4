#include "cloak/strip.hpp"

namespace cloak {

namespace {

TypeName strip_type(const TypeName& t) {
    TypeName out;
    out.kind = t.kind;
    out.span = t.span;
    switch (t.kind) {
        case TypeKind::Mapping:
            out.key = std::make_unique<TypeName>(strip_type(*t.key));
            out.value = std::make_unique<TypeName>(strip_type(*t.value));
            break;
        case TypeKind::Array:
            out.elem = std::make_unique<TypeName>(strip_type(*t.elem));
            out.dynamic = t.dynamic;
            out.fixed_size = t.fixed_size;
            break;
        default:
            break;
    }
    return out;
}

VarDecl strip_decl(const VarDecl& d, NodeCounter& ids) {
    VarDecl out;
    out.id = ids.next();
    out.span = d.span;
    out.type = strip_type(d.type);
    out.name = d.name;
    out.name_span = d.name_span;
    return out;
}

ExprPtr strip_expr(const Expr& e, NodeCounter& ids) {
    if (e.kind == ExprKind::Reveal)
        return strip_expr(*static_cast<const RevealExpr&>(e).value, ids);
    ExprPtr c = clone_expr(e, ids);
    // clone_expr copies reveal nodes verbatim; rebuild children that contain them.
    switch (c->kind) {
        case ExprKind::Index: {
            auto& x = static_cast<IndexExpr&>(*c);
            x.base = strip_expr(*x.base, ids);
            x.index = strip_expr(*x.index, ids);
            break;
        }
        case ExprKind::Length: {
            auto& x = static_cast<LengthExpr&>(*c);
            x.base = strip_expr(*x.base, ids);
            break;
        }
        case ExprKind::Unary: {
            auto& x = static_cast<UnaryExpr&>(*c);
            x.operand = strip_expr(*x.operand, ids);
            break;
        }
        case ExprKind::Binary: {
            auto& x = static_cast<BinaryExpr&>(*c);
            x.lhs = strip_expr(*x.lhs, ids);
            x.rhs = strip_expr(*x.rhs, ids);
            break;
        }
        case ExprKind::Assign: {
            auto& x = static_cast<AssignExpr&>(*c);
            x.target = strip_expr(*x.target, ids);
            x.value = strip_expr(*x.value, ids);
            break;
        }
        case ExprKind::IncDec: {
            auto& x = static_cast<IncDecExpr&>(*c);
            x.target = strip_expr(*x.target, ids);
            break;
        }
        default:
            break;
    }
    return c;
}

StmtPtr strip_stmt(const Stmt& s, NodeCounter& ids) {
    switch (s.kind) {
        case StmtKind::Block: {
            const auto& b = static_cast<const BlockStmt&>(s);
            auto n = std::make_unique<BlockStmt>(ids.next(), s.span);
            for (const auto& st : b.statements) n->statements.push_back(strip_stmt(*st, ids));
            return n;
        }
        case StmtKind::VarDecl: {
            const auto& v = static_cast<const VarDeclStmt&>(s);
            auto n = std::make_unique<VarDeclStmt>(ids.next(), s.span);
            n->decl = strip_decl(v.decl, ids);
            if (v.init) n->init = strip_expr(*v.init, ids);
            return n;
        }
        case StmtKind::Expr: {
            const auto& x = static_cast<const ExprStmt&>(s);
            auto n = std::make_unique<ExprStmt>(ids.next(), s.span);
            n->expr = strip_expr(*x.expr, ids);
            return n;
        }
        case StmtKind::If: {
            const auto& i = static_cast<const IfStmt&>(s);
            auto n = std::make_unique<IfStmt>(ids.next(), s.span);
            n->cond = strip_expr(*i.cond, ids);
            n->then_branch = strip_stmt(*i.then_branch, ids);
            if (i.else_branch) n->else_branch = strip_stmt(*i.else_branch, ids);
            return n;
        }
        case StmtKind::For: {
            const auto& f = static_cast<const ForStmt&>(s);
            auto n = std::make_unique<ForStmt>(ids.next(), s.span);
            if (f.init) n->init = strip_stmt(*f.init, ids);
            if (f.cond) n->cond = strip_expr(*f.cond, ids);
            if (f.update) n->update = strip_expr(*f.update, ids);
            n->body = strip_stmt(*f.body, ids);
            return n;
        }
        case StmtKind::Return: {
            const auto& r = static_cast<const ReturnStmt&>(s);
            auto n = std::make_unique<ReturnStmt>(ids.next(), s.span);
            for (const auto& v : r.values) n->values.push_back(strip_expr(*v, ids));
            return n;
        }
    }
    return nullptr;
}

}  // namespace

std::unique_ptr<ContractDecl> strip_contract(const ContractDecl& c, NodeCounter& ids) {
    auto out = std::make_unique<ContractDecl>();
    out->id = ids.next();
    out->span = c.span;
    out->name = c.name;
    out->name_span = c.name_span;
    for (const auto& sv : c.state_vars) out->state_vars.push_back(strip_decl(sv, ids));
    for (const auto& f : c.functions) {
        auto nf = std::make_unique<FunctionDecl>();
        nf->id = ids.next();
        nf->span = f->span;
        nf->name = f->name;
        nf->name_span = f->name_span;
        nf->visibility = f->visibility;
        for (const auto& p : f->params) nf->params.push_back(strip_decl(p, ids));
        for (const auto& r : f->returns) nf->returns.push_back(strip_decl(r, ids));
        StmtPtr body = strip_stmt(*f->body, ids);
        nf->body.reset(static_cast<BlockStmt*>(body.release()));
        out->functions.push_back(std::move(nf));
    }
    return out;
}

SourceFile strip_annotations(const SourceFile& f) {
    SourceFile out;
    out.buffer = SourceBuffer(f.buffer.path(), f.buffer.text());
    out.pragma_text = f.pragma_text;
    NodeCounter ids;
    for (const auto& c : f.contracts) out.contracts.push_back(strip_contract(*c, ids));
    return out;
}

namespace {

const char* ann_name(const OwnerAnnotation& a) {
    switch (a.kind) {
        case OwnerAnnKind::All: return "all";
        case OwnerAnnKind::Me: return "me";
        case OwnerAnnKind::Tee: return "tee";
        case OwnerAnnKind::Id: return a.name.c_str();
    }
    return "";
}

void collect_type(const TypeName& t, std::vector<std::string>& out) {
    switch (t.kind) {
        case TypeKind::Mapping:
            collect_type(*t.key, out);
            if (t.key_binding) out.push_back("!" + *t.key_binding);
            collect_type(*t.value, out);
            if (t.value_owner) out.push_back(std::string("@") + ann_name(*t.value_owner));
            break;
        case TypeKind::Array:
            collect_type(*t.elem, out);
            if (t.class_binding) out.push_back("[!" + *t.class_binding + "]");
            if (t.elem_owner) out.push_back(std::string("[@") + ann_name(*t.elem_owner) + "]");
            break;
        default:
            break;
    }
}

void collect_decl(const VarDecl& d, std::vector<std::string>& out) {
    collect_type(d.type, out);
    if (d.owner) out.push_back(std::string("@") + ann_name(*d.owner));
}

}  // namespace

std::vector<std::string> collect_annotations(const ContractDecl& c) {
    std::vector<std::string> out;
    for (const auto& sv : c.state_vars) collect_decl(sv, out);
    for (const auto& f : c.functions) {
        for (const auto& p : f->params) collect_decl(p, out);
        for (const auto& r : f->returns) collect_decl(r, out);
        for_each_stmt(*f->body, [&out](const Stmt& s) {
            auto visit_decl = [&out](const VarDecl& d) { collect_decl(d, out); };
            if (s.kind == StmtKind::VarDecl) visit_decl(static_cast<const VarDeclStmt&>(s).decl);
        });
    }
    return out;
}

}  // namespace cloak
