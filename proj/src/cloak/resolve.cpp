#include "cloak/resolve.hpp"

#include "cloak/pretty.hpp"

namespace cloak {

SemType SemType::of(const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: return {Uint, &t};
        case TypeKind::Bool: return {Bool, &t};
        case TypeKind::Address: return {Address, &t};
        case TypeKind::Mapping: return {Mapping, &t};
        case TypeKind::Array: return {Array, &t};
    }
    return {};
}

bool same_type(const SemType& a, const SemType& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == SemType::Mapping || a.kind == SemType::Array)
        return a.node && b.node && bare_type(*a.node) == bare_type(*b.node);
    return true;
}

namespace {

struct Scope {
    std::unordered_map<std::string, std::pair<const VarDecl*, DeclKind>> vars;
    std::unordered_map<std::string, const VarDecl*> class_bindings;  // name -> container decl
};

class Resolver {
public:
    Resolver(const ContractDecl& c, std::vector<Diagnostic>& diags) : contract_(c), diags_(diags) {}

    Resolution run() {
        res_.contract = &contract_;
        declare_contract_scope();
        for (const auto& f : contract_.functions) resolve_function(*f);
        return std::move(res_);
    }

private:
    const ContractDecl& contract_;
    std::vector<Diagnostic>& diags_;
    Resolution res_;
    std::vector<Scope> scopes_;
    const FunctionDecl* current_fn_ = nullptr;

    void error(std::string code, std::string msg, Span span) {
        diags_.push_back(Diagnostic::error(std::move(code), std::move(msg), span));
    }

    // ---- scopes ---------------------------------------------------------------

    void declare_var(const VarDecl& d, DeclKind kind) {
        auto& sc = scopes_.back();
        auto [it, inserted] = sc.vars.emplace(d.name, std::make_pair(&d, kind));
        if (!inserted)
            error(diag_code::duplicate_definition, "'" + d.name + "' is already declared in this scope",
                  d.name_span);
        register_type_bindings(d.type, d);
        if (current_fn_ && kind == DeclKind::Local) res_.function_locals[current_fn_].push_back(&d);
    }

    // Party-class bindings ([!p]) join the declaring scope. Mapping key
    // bindings stay private to their mapping type and resolve lexically.
    void register_type_bindings(const TypeName& t, const VarDecl& container) {
        if (t.kind == TypeKind::Array) {
            if (t.class_binding) {
                auto& sc = scopes_.back();
                auto [it, inserted] = sc.class_bindings.emplace(*t.class_binding, &container);
                if (!inserted)
                    error(diag_code::duplicate_definition,
                          "party-class binding '!" + *t.class_binding + "' is already declared in this scope",
                          t.class_binding_span);
            }
            register_type_bindings(*t.elem, container);
        } else if (t.kind == TypeKind::Mapping) {
            register_type_bindings(*t.value, container);
        }
    }

    std::pair<const VarDecl*, DeclKind> lookup(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->vars.find(name);
            if (f != it->vars.end()) return f->second;
        }
        return {nullptr, DeclKind::Local};
    }

    const VarDecl* lookup_class_binding(const std::string& name) const {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->class_bindings.find(name);
            if (f != it->class_bindings.end()) return f->second;
        }
        return nullptr;
    }

    void declare_contract_scope() {
        scopes_.clear();
        scopes_.emplace_back();
        for (const auto& sv : contract_.state_vars) declare_var(sv, DeclKind::State);
        std::unordered_map<std::string, Span> fn_names;
        for (const auto& f : contract_.functions) {
            auto [it, inserted] = fn_names.emplace(f->name, f->name_span);
            if (!inserted)
                error(diag_code::duplicate_definition, "function '" + f->name + "' is already declared",
                      f->name_span);
        }
        // Annotations on state declarations resolve against contract scope.
        for (const auto& sv : contract_.state_vars) resolve_decl_annotations(sv);
    }

    // ---- annotation references -------------------------------------------------

    void resolve_owner_ann(const OwnerAnnotation& a, const TypeName* enclosing_mapping_chain_tail) {
        if (a.kind != OwnerAnnKind::Id) return;
        AnnRef ref;
        ref.name = a.name;
        // Innermost enclosing mapping key bindings first.
        for (const TypeName* m = enclosing_mapping_chain_tail; m; m = mapping_parent_.count(m) ? mapping_parent_.at(m) : nullptr) {
            if (m->key_binding && *m->key_binding == a.name) {
                ref.kind = AnnRefKind::KeyBinding;
                res_.ann_refs[&a] = ref;
                return;
            }
        }
        if (const VarDecl* container = lookup_class_binding(a.name)) {
            ref.kind = AnnRefKind::ClassBinding;
            ref.decl = container;
            res_.ann_refs[&a] = ref;
            return;
        }
        auto [decl, kind] = lookup(a.name);
        if (decl && decl->type.kind == TypeKind::Address) {
            ref.kind = AnnRefKind::AddressVar;
            ref.decl = decl;
            res_.ann_refs[&a] = ref;
            return;
        }
        ref.kind = AnnRefKind::Unresolved;
        res_.ann_refs[&a] = ref;
    }

    // Tracks enclosing-mapping links so nested value annotations can reach
    // outer key bindings.
    std::unordered_map<const TypeName*, const TypeName*> mapping_parent_;

    void resolve_type_annotations(const TypeName& t, const TypeName* enclosing_mapping) {
        if (t.kind == TypeKind::Mapping) {
            if (enclosing_mapping) mapping_parent_[&t] = enclosing_mapping;
            if (t.value_owner) resolve_owner_ann(*t.value_owner, &t);
            resolve_type_annotations(*t.value, &t);
        } else if (t.kind == TypeKind::Array) {
            if (t.elem_owner) resolve_owner_ann(*t.elem_owner, enclosing_mapping);
            resolve_type_annotations(*t.elem, enclosing_mapping);
        }
    }

    void resolve_decl_annotations(const VarDecl& d) {
        if (d.owner) resolve_owner_ann(*d.owner, nullptr);
        resolve_type_annotations(d.type, nullptr);
    }

    // ---- functions ---------------------------------------------------------------

    void resolve_function(const FunctionDecl& f) {
        current_fn_ = &f;
        res_.function_locals[&f];
        scopes_.emplace_back();
        for (const auto& p : f.params) {
            if (p.type.kind == TypeKind::Mapping)
                error(diag_code::unsupported_construct, "mapping parameters are not supported",
                      p.type.span);
            declare_var(p, DeclKind::Param);
        }
        for (const auto& r : f.returns) {
            if (!r.type.is_scalar() && !(r.type.kind == TypeKind::Array))
                error(diag_code::unsupported_construct, "unsupported return type", r.type.span);
            declare_var(r, DeclKind::Return);
        }
        // Annotations resolve after the whole signature is in scope, so a
        // class binding may appear in any parameter position.
        for (const auto& p : f.params) resolve_decl_annotations(p);
        for (const auto& r : f.returns) resolve_decl_annotations(r);
        resolve_block(*f.body);
        scopes_.pop_back();
        current_fn_ = nullptr;
    }

    void resolve_block(const BlockStmt& b) {
        scopes_.emplace_back();
        for (const auto& s : b.statements) resolve_stmt(*s);
        scopes_.pop_back();
    }

    void resolve_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                resolve_block(static_cast<const BlockStmt&>(s));
                break;
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(s);
                if (v.decl.type.kind == TypeKind::Mapping)
                    error(diag_code::unsupported_construct, "local mapping declarations are not supported",
                          v.decl.type.span);
                SemType declared = SemType::of(v.decl.type);
                if (v.init) {
                    SemType it = resolve_expr(*v.init);
                    if (!declared.scalar())
                        error(diag_code::unsupported_construct,
                              "only scalar local declarations may have an initializer", v.decl.span);
                    else if (it.kind != SemType::Invalid && !same_type(declared, it))
                        error(diag_code::type_mismatch,
                              "initializer type does not match declared type of '" + v.decl.name + "'",
                              v.init->span);
                }
                declare_var(v.decl, DeclKind::Local);
                resolve_decl_annotations(v.decl);
                break;
            }
            case StmtKind::Expr:
                resolve_expr(*static_cast<const ExprStmt&>(s).expr);
                break;
            case StmtKind::If: {
                const auto& i = static_cast<const IfStmt&>(s);
                require_bool(*i.cond);
                resolve_stmt(*i.then_branch);
                if (i.else_branch) resolve_stmt(*i.else_branch);
                break;
            }
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(s);
                scopes_.emplace_back();
                if (f.init) resolve_stmt(*f.init);
                if (f.cond) require_bool(*f.cond);
                if (f.update) resolve_expr(*f.update);
                resolve_stmt(*f.body);
                scopes_.pop_back();
                break;
            }
            case StmtKind::Return: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                if (r.values.empty()) break;
                if (!current_fn_ || r.values.size() != current_fn_->returns.size()) {
                    error(diag_code::type_mismatch, "return value count does not match function signature",
                          s.span);
                    for (const auto& v : r.values) resolve_expr(*v);
                    break;
                }
                for (size_t i = 0; i < r.values.size(); ++i) {
                    SemType vt = resolve_expr(*r.values[i]);
                    SemType rt = SemType::of(current_fn_->returns[i].type);
                    if (vt.kind != SemType::Invalid && !same_type(vt, rt))
                        error(diag_code::type_mismatch,
                              "return value type does not match '" + current_fn_->returns[i].name + "'",
                              r.values[i]->span);
                }
                break;
            }
        }
    }

    void require_bool(const Expr& e) {
        SemType t = resolve_expr(e);
        if (t.kind != SemType::Invalid && !t.is(SemType::Bool))
            error(diag_code::type_mismatch, "condition must be a bool expression", e.span);
    }

    SemType record(const Expr& e, SemType t) {
        res_.expr_type[e.id] = t;
        return t;
    }

    bool is_lvalue(const Expr& e) const {
        if (e.kind == ExprKind::Ident) return true;
        if (e.kind == ExprKind::Index) return is_lvalue(*static_cast<const IndexExpr&>(e).base);
        return false;
    }

    SemType resolve_expr(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal: {
                const auto& l = static_cast<const LiteralExpr&>(e);
                return record(e, SemType{l.is_bool ? SemType::Bool : SemType::Uint, nullptr});
            }
            case ExprKind::Ident: {
                const auto& i = static_cast<const IdentExpr&>(e);
                auto [decl, kind] = lookup(i.name);
                if (!decl) {
                    error(diag_code::undeclared_identifier, "'" + i.name + "' is not declared", e.span);
                    return record(e, SemType{});
                }
                res_.ident_decl[e.id] = decl;
                res_.ident_kind[e.id] = kind;
                return record(e, SemType::of(decl->type));
            }
            case ExprKind::MsgSender:
                return record(e, SemType{SemType::Address, nullptr});
            case ExprKind::Index: {
                const auto& x = static_cast<const IndexExpr&>(e);
                SemType bt = resolve_expr(*x.base);
                SemType it = resolve_expr(*x.index);
                if (bt.kind == SemType::Invalid) return record(e, SemType{});
                if (bt.is(SemType::Mapping)) {
                    SemType kt = SemType::of(*bt.node->key);
                    if (it.kind != SemType::Invalid && !same_type(it, kt))
                        error(diag_code::type_mismatch, "mapping key type mismatch", x.index->span);
                    return record(e, SemType::of(*bt.node->value));
                }
                if (bt.is(SemType::Array)) {
                    if (it.kind != SemType::Invalid && !it.is(SemType::Uint))
                        error(diag_code::type_mismatch, "array index must be uint", x.index->span);
                    return record(e, SemType::of(*bt.node->elem));
                }
                error(diag_code::type_mismatch, "only arrays and mappings can be indexed", x.base->span);
                return record(e, SemType{});
            }
            case ExprKind::Length: {
                const auto& x = static_cast<const LengthExpr&>(e);
                SemType bt = resolve_expr(*x.base);
                if (bt.kind != SemType::Invalid && !bt.is(SemType::Array))
                    error(diag_code::type_mismatch, "'.length' requires an array", x.base->span);
                return record(e, SemType{SemType::Uint, nullptr});
            }
            case ExprKind::Unary: {
                const auto& x = static_cast<const UnaryExpr&>(e);
                SemType t = resolve_expr(*x.operand);
                if (x.op == UnaryOp::Not) {
                    if (t.kind != SemType::Invalid && !t.is(SemType::Bool))
                        error(diag_code::type_mismatch, "'!' requires a bool operand", x.operand->span);
                    return record(e, SemType{SemType::Bool, nullptr});
                }
                if (t.kind != SemType::Invalid && !t.is(SemType::Uint))
                    error(diag_code::type_mismatch, "unary '-' requires a uint operand", x.operand->span);
                return record(e, SemType{SemType::Uint, nullptr});
            }
            case ExprKind::Binary: {
                const auto& x = static_cast<const BinaryExpr&>(e);
                SemType lt = resolve_expr(*x.lhs);
                SemType rt = resolve_expr(*x.rhs);
                bool known = lt.kind != SemType::Invalid && rt.kind != SemType::Invalid;
                switch (x.op) {
                    case BinaryOp::Add: case BinaryOp::Sub: case BinaryOp::Mul:
                    case BinaryOp::Div: case BinaryOp::Mod:
                        if (known && !(lt.is(SemType::Uint) && rt.is(SemType::Uint)))
                            error(diag_code::type_mismatch, "arithmetic requires uint operands", e.span);
                        return record(e, SemType{SemType::Uint, nullptr});
                    case BinaryOp::Lt: case BinaryOp::Gt: case BinaryOp::Le: case BinaryOp::Ge:
                        if (known && !(lt.is(SemType::Uint) && rt.is(SemType::Uint)))
                            error(diag_code::type_mismatch, "comparison requires uint operands", e.span);
                        return record(e, SemType{SemType::Bool, nullptr});
                    case BinaryOp::Eq: case BinaryOp::Ne:
                        if (known && (!lt.scalar() || !same_type(lt, rt)))
                            error(diag_code::type_mismatch, "equality requires scalar operands of one type",
                                  e.span);
                        return record(e, SemType{SemType::Bool, nullptr});
                    case BinaryOp::And: case BinaryOp::Or:
                        if (known && !(lt.is(SemType::Bool) && rt.is(SemType::Bool)))
                            error(diag_code::type_mismatch, "logical operator requires bool operands", e.span);
                        return record(e, SemType{SemType::Bool, nullptr});
                }
                return record(e, SemType{});
            }
            case ExprKind::Assign: {
                const auto& x = static_cast<const AssignExpr&>(e);
                SemType lt = resolve_expr(*x.target);
                SemType rt = resolve_expr(*x.value);
                if (!is_lvalue(*x.target))
                    error(diag_code::type_mismatch, "assignment target is not assignable", x.target->span);
                bool known = lt.kind != SemType::Invalid && rt.kind != SemType::Invalid;
                if (x.op == AssignOp::Assign) {
                    if (known && (!lt.scalar() || !same_type(lt, rt)))
                        error(diag_code::type_mismatch, "assignment requires matching scalar types", e.span);
                } else {
                    if (known && !(lt.is(SemType::Uint) && rt.is(SemType::Uint)))
                        error(diag_code::type_mismatch, "compound assignment requires uint operands", e.span);
                }
                return record(e, lt);
            }
            case ExprKind::IncDec: {
                const auto& x = static_cast<const IncDecExpr&>(e);
                SemType t = resolve_expr(*x.target);
                if (!is_lvalue(*x.target))
                    error(diag_code::type_mismatch, "'++'/'--' target is not assignable", x.target->span);
                if (t.kind != SemType::Invalid && !t.is(SemType::Uint))
                    error(diag_code::type_mismatch, "'++'/'--' requires a uint target", x.target->span);
                return record(e, SemType{SemType::Uint, nullptr});
            }
            case ExprKind::Reveal: {
                const auto& x = static_cast<const RevealExpr&>(e);
                SemType t = resolve_expr(*x.value);
                if (t.kind != SemType::Invalid && !t.scalar())
                    error(diag_code::type_mismatch, "reveal requires a scalar value", x.value->span);
                if (x.target.kind == OwnerAnnKind::Id) resolve_owner_ann(x.target, nullptr);
                return record(e, t);
            }
        }
        return record(e, SemType{});
    }
};

}  // namespace

Resolution resolve_contract(const ContractDecl& c, std::vector<Diagnostic>& diags) {
    Resolver r(c, diags);
    return r.run();
}

std::vector<Diagnostic> validate_subset(const SourceFile& f) {
    std::vector<Diagnostic> diags = f.diagnostics;
    for (const auto& c : f.contracts) resolve_contract(*c, diags);
    return diags;
}

}  // namespace cloak
