#pragma once

#include <unordered_map>

#include "cloak/ast.hpp"

namespace cloak {

enum class DeclKind { State, Param, Return, Local };

struct SemType {
    enum Kind { Invalid, Uint, Bool, Address, Mapping, Array };
    Kind kind = Invalid;
    const TypeName* node = nullptr;  // set for Mapping/Array

    bool is(Kind k) const { return kind == k; }
    bool scalar() const { return kind == Uint || kind == Bool || kind == Address; }
    static SemType of(const TypeName& t);
};

bool same_type(const SemType& a, const SemType& b);

// What an owner annotation's identifier refers to.
enum class AnnRefKind { AddressVar, KeyBinding, ClassBinding, Unresolved };

struct AnnRef {
    AnnRefKind kind = AnnRefKind::Unresolved;
    std::string name;
    const VarDecl* decl = nullptr;  // AddressVar: the variable; bindings: the container decl
};

// Name and type facts for one contract. Pointers reference the resolved
// contract's AST, which must outlive this structure.
struct Resolution {
    const ContractDecl* contract = nullptr;
    std::unordered_map<NodeId, const VarDecl*> ident_decl;
    std::unordered_map<NodeId, DeclKind> ident_kind;
    std::unordered_map<NodeId, SemType> expr_type;
    std::unordered_map<const OwnerAnnotation*, AnnRef> ann_refs;
    std::unordered_map<const FunctionDecl*, std::vector<const VarDecl*>> function_locals;

    const VarDecl* decl_of(const Expr& e) const {
        auto it = ident_decl.find(e.id);
        return it == ident_decl.end() ? nullptr : it->second;
    }
    SemType type_of(const Expr& e) const {
        auto it = expr_type.find(e.id);
        return it == expr_type.end() ? SemType{} : it->second;
    }
};

// Binds names, checks types, and enforces the supported language subset.
// Annotations are resolved into ann_refs but not themselves validated here;
// ownership checking reports on them.
Resolution resolve_contract(const ContractDecl& c, std::vector<Diagnostic>& diags);

// Subset validation over a whole file (used on stripped and generated code).
std::vector<Diagnostic> validate_subset(const SourceFile& f);

}  // namespace cloak
