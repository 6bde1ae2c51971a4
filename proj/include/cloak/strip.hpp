#pragma once

#include "cloak/ast.hpp"

namespace cloak {

// Rebuilds the tree without owner annotations, key/class bindings, or reveal
// wrappers (reveal(e, o) becomes e). The result is plain Solidity-subset code.
// Idempotent: strip(strip(x)) is structurally equal to strip(x).
SourceFile strip_annotations(const SourceFile& f);
std::unique_ptr<ContractDecl> strip_contract(const ContractDecl& c, NodeCounter& ids);

// Lists every owner annotation and binding in the tree, in source order.
// Rendered as written: "@all", "@k", "!k", "[!p]", "[@p]".
std::vector<std::string> collect_annotations(const ContractDecl& c);

}  // namespace cloak
