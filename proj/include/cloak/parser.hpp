#pragma once

#include "cloak/ast.hpp"

namespace cloak {

// Parses a whole translation unit. On the first syntax error the result holds
// diagnostics and an empty contract list; no partial tree is exposed.
SourceFile parse_source(std::string path, std::string text);
SourceFile parse_source(SourceBuffer buffer);

}  // namespace cloak
