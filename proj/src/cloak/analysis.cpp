#include "cloak/analysis.hpp"

#include <chrono>
#include <set>

namespace cloak {

const char* function_kind_name(FunctionKind k) {
    switch (k) {
        case FunctionKind::Public: return "public";
        case FunctionKind::Private: return "private";
        case FunctionKind::Mpt: return "mpt";
    }
    return "?";
}

const FunctionAnalysis* CheckedContract::function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.fn->name == name) return &f;
    return nullptr;
}

namespace {

OwnerAtom atom_from_ann(const OwnerAnnotation& a, const Resolution& res) {
    switch (a.kind) {
        case OwnerAnnKind::All: return OwnerAtom::all();
        case OwnerAnnKind::Me: return OwnerAtom::me();
        case OwnerAnnKind::Tee: return OwnerAtom::tee();
        case OwnerAnnKind::Id: {
            auto it = res.ann_refs.find(&a);
            if (it == res.ann_refs.end()) return OwnerAtom::all();
            switch (it->second.kind) {
                case AnnRefKind::AddressVar: return OwnerAtom::party(a.name);
                case AnnRefKind::KeyBinding:
                case AnnRefKind::ClassBinding: return OwnerAtom::party_class(a.name);
                case AnnRefKind::Unresolved: return OwnerAtom::all();
            }
        }
    }
    return OwnerAtom::all();
}

}  // namespace

OwnerSet declared_owner_set(const VarDecl& d, const Resolution& res) {
    if (d.owner) return OwnerSet::single(atom_from_ann(*d.owner, res));
    if (d.type.kind == TypeKind::Array && d.type.elem_owner)
        return OwnerSet::single(atom_from_ann(*d.type.elem_owner, res));
    return OwnerSet{OwnerAtom::all()};
}

FunctionKind classify_owner_set(const OwnerSet& combined) {
    if (combined.contains_kind(OwnerKind::Tee) || combined.contains_kind(OwnerKind::PartyClass) ||
        combined.private_count() >= 2)
        return FunctionKind::Mpt;
    if (combined.private_count() == 1) return FunctionKind::Private;
    return FunctionKind::Public;
}

namespace {

enum class SlotKind { State, Param, Return, Local };

class FunctionChecker {
public:
    FunctionChecker(const ContractDecl& contract, const FunctionDecl& fn, const Resolution& res,
                    std::vector<Diagnostic>& diags)
        : contract_(contract), fn_(fn), res_(res), diags_(diags) {
        for (const auto& sv : contract.state_vars) slot_kind_[&sv] = SlotKind::State;
        for (const auto& p : fn.params) slot_kind_[&p] = SlotKind::Param;
        for (const auto& r : fn.returns) slot_kind_[&r] = SlotKind::Return;
        auto it = res.function_locals.find(&fn);
        if (it != res.function_locals.end())
            for (const VarDecl* l : it->second) slot_kind_[l] = SlotKind::Local;
    }

    FunctionAnalysis run() {
        out_.fn = &fn_;
        check_reveal_targets();
        infer_stmt(*fn_.body);
        for (const auto& [id, set] : out_.owner_of) {
            (void)id;
            out_.combined.unite(set);
        }
        for (const auto& p : fn_.params) out_.combined.unite(declared_owner_set(p, res_));
        for (const auto& r : fn_.returns) out_.combined.unite(declared_owner_set(r, res_));
        out_.kind = classify_owner_set(out_.combined);
        check_consistency();
        return std::move(out_);
    }

private:
    const ContractDecl& contract_;
    const FunctionDecl& fn_;
    const Resolution& res_;
    std::vector<Diagnostic>& diags_;
    FunctionAnalysis out_;
    std::unordered_map<const VarDecl*, SlotKind> slot_kind_;

    struct Edge {
        OwnerSet from;
        OwnerAtom to;
    };
    std::vector<Edge> edges_;

    struct Flow {
        const Expr* src;
        OwnerSet from;
        OwnerSet to;
    };
    std::vector<Flow> flows_;

    void error(std::string code, std::string msg, Span span) {
        diags_.push_back(Diagnostic::error(std::move(code), std::move(msg), span));
    }

    // ---- reveal target validation ------------------------------------------------

    // A reveal to a named party requires an address variable with a value at
    // that point: a parameter, a state variable, or something assigned in an
    // earlier statement.
    void check_reveal_targets() {
        std::set<const VarDecl*> assigned;
        walk_ordered(*fn_.body, assigned);
    }

    void walk_ordered(const Stmt& s, std::set<const VarDecl*>& assigned) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& st : static_cast<const BlockStmt&>(s).statements)
                    walk_ordered(*st, assigned);
                break;
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(s);
                if (v.init) {
                    visit_reveals(*v.init, assigned);
                    assigned.insert(&v.decl);
                }
                break;
            }
            case StmtKind::Expr: {
                const Expr& e = *static_cast<const ExprStmt&>(s).expr;
                visit_reveals(e, assigned);
                mark_assigned(e, assigned);
                break;
            }
            case StmtKind::If: {
                const auto& i = static_cast<const IfStmt&>(s);
                visit_reveals(*i.cond, assigned);
                mark_assigned(*i.cond, assigned);
                walk_ordered(*i.then_branch, assigned);
                if (i.else_branch) walk_ordered(*i.else_branch, assigned);
                break;
            }
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(s);
                if (f.init) walk_ordered(*f.init, assigned);
                if (f.cond) {
                    visit_reveals(*f.cond, assigned);
                    mark_assigned(*f.cond, assigned);
                }
                walk_ordered(*f.body, assigned);
                if (f.update) {
                    visit_reveals(*f.update, assigned);
                    mark_assigned(*f.update, assigned);
                }
                break;
            }
            case StmtKind::Return:
                for (const auto& v : static_cast<const ReturnStmt&>(s).values) {
                    visit_reveals(*v, assigned);
                    mark_assigned(*v, assigned);
                }
                break;
        }
    }

    void mark_assigned(const Expr& e, std::set<const VarDecl*>& assigned) {
        for_each_expr(e, [this, &assigned](const Expr& x) {
            const Expr* target = nullptr;
            if (x.kind == ExprKind::Assign)
                target = static_cast<const AssignExpr&>(x).target.get();
            else if (x.kind == ExprKind::IncDec)
                target = static_cast<const IncDecExpr&>(x).target.get();
            if (target && target->kind == ExprKind::Ident)
                if (const VarDecl* d = res_.decl_of(*target)) assigned.insert(d);
        });
    }

    void visit_reveals(const Expr& e, const std::set<const VarDecl*>& assigned) {
        for_each_expr(e, [this, &assigned](const Expr& x) {
            if (x.kind != ExprKind::Reveal) return;
            const auto& r = static_cast<const RevealExpr&>(x);
            if (r.target.kind != OwnerAnnKind::Id) return;
            auto it = res_.ann_refs.find(&r.target);
            if (it == res_.ann_refs.end() || it->second.kind == AnnRefKind::Unresolved) {
                error(diag_code::unresolved_owner,
                      "reveal target '" + r.target.name + "' does not name an address variable",
                      r.target.span);
                return;
            }
            if (it->second.kind != AnnRefKind::AddressVar) {
                error(diag_code::unresolved_owner,
                      "reveal target '" + r.target.name + "' must be a single address variable",
                      r.target.span);
                return;
            }
            const VarDecl* d = it->second.decl;
            auto k = slot_kind_.find(d);
            SlotKind kind = k == slot_kind_.end() ? SlotKind::Local : k->second;
            if ((kind == SlotKind::Return || kind == SlotKind::Local) && !assigned.count(d))
                error(diag_code::unresolved_owner,
                      "reveal target '" + r.target.name + "' may be unassigned at this point",
                      r.target.span);
        });
    }

    // ---- owner inference ----------------------------------------------------------

    void infer_stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& st : static_cast<const BlockStmt&>(s).statements) infer_stmt(*st);
                break;
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(s);
                if (v.init) {
                    OwnerSet from = infer(*v.init);
                    flows_.push_back({v.init.get(), from, declared_owner_set(v.decl, res_)});
                }
                break;
            }
            case StmtKind::Expr:
                infer(*static_cast<const ExprStmt&>(s).expr);
                break;
            case StmtKind::If: {
                const auto& i = static_cast<const IfStmt&>(s);
                infer(*i.cond);
                infer_stmt(*i.then_branch);
                if (i.else_branch) infer_stmt(*i.else_branch);
                break;
            }
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(s);
                if (f.init) infer_stmt(*f.init);
                if (f.cond) infer(*f.cond);
                if (f.update) infer(*f.update);
                infer_stmt(*f.body);
                break;
            }
            case StmtKind::Return: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                bool arity_ok = r.values.size() == fn_.returns.size();
                for (size_t i = 0; i < r.values.size(); ++i) {
                    OwnerSet from = infer(*r.values[i]);
                    if (arity_ok)
                        flows_.push_back(
                            {r.values[i].get(), from, declared_owner_set(fn_.returns[i], res_)});
                }
                break;
            }
        }
    }

    OwnerSet record(const Expr& e, OwnerSet s) {
        out_.owner_of[e.id] = s;
        return s;
    }

    OwnerSet infer(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Literal:
            case ExprKind::MsgSender:
                return record(e, OwnerSet{OwnerAtom::all()});
            case ExprKind::Ident: {
                const VarDecl* d = res_.decl_of(e);
                if (!d) return record(e, OwnerSet{OwnerAtom::all()});
                return record(e, declared_owner_set(*d, res_));
            }
            case ExprKind::Length:
                return record(e, infer(*static_cast<const LengthExpr&>(e).base));
            case ExprKind::Unary:
                return record(e, infer(*static_cast<const UnaryExpr&>(e).operand));
            case ExprKind::IncDec:
                return record(e, infer(*static_cast<const IncDecExpr&>(e).target));
            case ExprKind::Binary: {
                const auto& x = static_cast<const BinaryExpr&>(e);
                OwnerSet s = infer(*x.lhs);
                s.unite(infer(*x.rhs));
                return record(e, s);
            }
            case ExprKind::Assign: {
                const auto& x = static_cast<const AssignExpr&>(e);
                OwnerSet to = infer(*x.target);
                OwnerSet from = infer(*x.value);
                if (x.op == AssignOp::Assign) flows_.push_back({x.value.get(), from, to});
                OwnerSet s = to;
                s.unite(from);
                return record(e, s);
            }
            case ExprKind::Reveal: {
                const auto& x = static_cast<const RevealExpr&>(e);
                OwnerSet inner = infer(*x.value);
                OwnerAtom target = reveal_atom(x);
                edges_.push_back({inner, target});
                return record(e, OwnerSet::single(target));
            }
            case ExprKind::Index:
                return record(e, infer_index(static_cast<const IndexExpr&>(e)));
        }
        return record(e, OwnerSet{OwnerAtom::all()});
    }

    OwnerAtom reveal_atom(const RevealExpr& x) {
        switch (x.target.kind) {
            case OwnerAnnKind::All: return OwnerAtom::all();
            case OwnerAnnKind::Tee: return OwnerAtom::tee();
            case OwnerAnnKind::Me: return OwnerAtom::me();
            case OwnerAnnKind::Id: {
                auto it = res_.ann_refs.find(&x.target);
                if (it != res_.ann_refs.end() && it->second.kind == AnnRefKind::AddressVar)
                    return OwnerAtom::party(x.target.name);
                return OwnerAtom::all();
            }
        }
        return OwnerAtom::all();
    }

    // The slot owner of an element access comes from the container's
    // annotations; the index expression itself selects which key binding
    // instance is meant.
    OwnerSet infer_index(const IndexExpr& x) {
        SemType bt = res_.type_of(*x.base);
        infer(*x.base);
        infer(*x.index);
        if (bt.is(SemType::Mapping) && bt.node) {
            const auto& ann = bt.node->value_owner;
            if (!ann) return OwnerSet{OwnerAtom::all()};
            return OwnerSet::single(container_atom(*ann, x));
        }
        if (bt.is(SemType::Array) && bt.node) {
            if (bt.node->class_binding) return OwnerSet{OwnerAtom::all()};  // address list is public
            const auto& ann = bt.node->elem_owner;
            if (!ann) return OwnerSet{OwnerAtom::all()};
            return OwnerSet::single(container_atom(*ann, x));
        }
        return OwnerSet{OwnerAtom::all()};
    }

    OwnerAtom container_atom(const OwnerAnnotation& ann, const IndexExpr& site) {
        switch (ann.kind) {
            case OwnerAnnKind::All: return OwnerAtom::all();
            case OwnerAnnKind::Me: return OwnerAtom::me();
            case OwnerAnnKind::Tee: return OwnerAtom::tee();
            case OwnerAnnKind::Id: break;
        }
        auto it = res_.ann_refs.find(&ann);
        if (it == res_.ann_refs.end()) return OwnerAtom::all();
        switch (it->second.kind) {
            case AnnRefKind::AddressVar: return OwnerAtom::party(ann.name);
            case AnnRefKind::ClassBinding: return OwnerAtom::party_class(ann.name);
            case AnnRefKind::KeyBinding: {
                // Find the index level that instantiates this binding.
                const Expr* key = binding_key(site, ann.name);
                if (!key) return OwnerAtom::party_class(ann.name);
                if (key->kind == ExprKind::MsgSender) return OwnerAtom::me();
                if (key->kind == ExprKind::Ident)
                    return OwnerAtom::party(static_cast<const IdentExpr&>(*key).name);
                return OwnerAtom::party_class(ann.name);
            }
            case AnnRefKind::Unresolved: return OwnerAtom::all();
        }
        return OwnerAtom::all();
    }

    const Expr* binding_key(const IndexExpr& leaf, const std::string& binding) {
        const Expr* node = &leaf;
        while (node && node->kind == ExprKind::Index) {
            const auto& x = static_cast<const IndexExpr&>(*node);
            SemType bt = res_.type_of(*x.base);
            if (bt.is(SemType::Mapping) && bt.node && bt.node->key_binding &&
                *bt.node->key_binding == binding)
                return x.index.get();
            node = x.base.get();
        }
        return nullptr;
    }

    // ---- consistency ----------------------------------------------------------------

    bool sanctioned(const OwnerAtom& a, const OwnerSet& to) const {
        for (const auto& e : edges_)
            if (e.from.contains(a) && to.contains(e.to)) return true;
        return false;
    }

    void check_consistency() {
        std::set<std::string> reported;
        for (const auto& f : flows_) {
            OwnerSet excess;
            for (const auto& a : f.from) {
                if (a.kind == OwnerKind::All) continue;
                if (f.to.contains(a)) continue;
                if (!sanctioned(a, f.to)) excess.insert(a);
            }
            if (excess.empty()) continue;
            std::string key = f.from.to_string() + "->" + f.to.to_string();
            if (!reported.insert(key).second) continue;
            error(diag_code::implicit_flow,
                  "implicit flow of data owned by " + f.from.to_string() +
                      " into a location owned by " + f.to.to_string() +
                      "; use reveal to declassify",
                  f.src->span);
        }
    }
};

void validate_annotation_refs(const ContractDecl& c, const Resolution& res,
                              std::vector<Diagnostic>& diags) {
    auto check_ann = [&](const OwnerAnnotation& a, bool state_position) {
        if (state_position && a.kind == OwnerAnnKind::Me) {
            diags.push_back(Diagnostic::error(
                diag_code::unresolved_owner,
                "the 'me' owner is relative to a caller and is not meaningful on state declarations",
                a.span));
            return;
        }
        if (a.kind != OwnerAnnKind::Id) return;
        auto it = res.ann_refs.find(&a);
        if (it == res.ann_refs.end() || it->second.kind == AnnRefKind::Unresolved)
            diags.push_back(Diagnostic::error(
                diag_code::unresolved_owner,
                "owner '@" + a.name + "' does not name an address variable, key binding, or party class",
                a.span));
    };
    std::function<void(const TypeName&, bool)> check_type = [&](const TypeName& t, bool state_position) {
        if (t.kind == TypeKind::Mapping) {
            if (t.value_owner) check_ann(*t.value_owner, state_position);
            check_type(*t.value, state_position);
        } else if (t.kind == TypeKind::Array) {
            if (t.elem_owner) check_ann(*t.elem_owner, state_position);
            check_type(*t.elem, state_position);
        }
    };
    auto check_decl = [&](const VarDecl& d, bool state_position) {
        if (d.owner) check_ann(*d.owner, state_position);
        check_type(d.type, state_position);
    };
    for (const auto& sv : c.state_vars) check_decl(sv, true);
    for (const auto& f : c.functions) {
        for (const auto& p : f->params) check_decl(p, false);
        for (const auto& r : f->returns) check_decl(r, false);
        for_each_stmt(*f->body, [&](const Stmt& s) {
            if (s.kind == StmtKind::VarDecl) check_decl(static_cast<const VarDeclStmt&>(s).decl, false);
        });
    }
}

}  // namespace

CheckedContract check_contract(const ContractDecl& c) {
    CheckedContract out;
    out.contract = &c;
    out.resolution = resolve_contract(c, out.diagnostics);
    validate_annotation_refs(c, out.resolution, out.diagnostics);
    for (const auto& f : c.functions) {
        auto start = std::chrono::steady_clock::now();
        FunctionChecker checker(c, *f, out.resolution, out.diagnostics);
        out.functions.push_back(checker.run());
        auto stop = std::chrono::steady_clock::now();
        out.functions.back().check_us = static_cast<long>(
            std::chrono::duration_cast<std::chrono::microseconds>(stop - start).count());
    }
    return out;
}

}  // namespace cloak
