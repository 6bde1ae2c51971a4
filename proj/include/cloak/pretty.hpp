#pragma once

#include <string>

#include "cloak/ast.hpp"

namespace cloak {

// Canonical source rendering. Parsing the output yields a structurally equal
// tree (spans and node ids aside).
std::string pretty_print(const SourceFile& f);
std::string pretty_contract(const ContractDecl& c);
std::string pretty_function(const FunctionDecl& f, int indent = 0);
std::string pretty_type(const TypeName& t);
std::string pretty_expr(const Expr& e);

// Type rendering with bindings and owner annotations removed, as used by
// policy records: "uint", "address[]", "uint[3]", "mapping(address=>uint)".
std::string bare_type(const TypeName& t);

}  // namespace cloak
