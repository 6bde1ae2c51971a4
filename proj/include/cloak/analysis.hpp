#pragma once

#include "cloak/owners.hpp"
#include "cloak/resolve.hpp"

namespace cloak {

enum class FunctionKind { Public, Private, Mpt };

const char* function_kind_name(FunctionKind k);  // "public" / "private" / "mpt"

struct FunctionAnalysis {
    const FunctionDecl* fn = nullptr;
    FunctionKind kind = FunctionKind::Public;
    OwnerSet combined;  // union over expression owners, parameter and return owners
    std::unordered_map<NodeId, OwnerSet> owner_of;
    long check_us = 0;  // wall time spent analysing this function
};

struct CheckedContract {
    const ContractDecl* contract = nullptr;
    Resolution resolution;
    std::vector<FunctionAnalysis> functions;
    std::vector<Diagnostic> diagnostics;

    bool ok() const { return !has_errors(diagnostics); }
    const FunctionAnalysis* function(const std::string& name) const;
};

// Resolves, infers data owners for every expression, classifies each function,
// and checks that private data only crosses owner boundaries through reveal.
CheckedContract check_contract(const ContractDecl& c);

// Owner set a declaration contributes when read as a whole.
OwnerSet declared_owner_set(const VarDecl& d, const Resolution& res);

// Classification from the combined owner set.
FunctionKind classify_owner_set(const OwnerSet& combined);

}  // namespace cloak
