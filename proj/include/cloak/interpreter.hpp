#pragma once

#include <map>
#include <set>

#include "cloak/resolve.hpp"
#include "cloak/value.hpp"

namespace cloak {

// Raised on division by zero, out-of-bounds access, missing arguments, or the
// step limit. Aborts the call; the caller's state copy is discarded.
struct RuntimeError {
    std::string message;
    Span span;
};

struct InterpretResult {
    std::vector<std::pair<std::string, Value>> returns;  // declaration order
    std::map<std::string, Value> state;                  // post-call state
    std::set<std::string> written;                       // state slots assigned
    std::map<std::string, Value> body_locals;            // final body-level locals
};

// Big-step evaluation of one function call. `args` is keyed by parameter
// name and must be complete and well-typed. State is taken by value; the
// result carries the updated copy.
InterpretResult interpret_function(const FunctionDecl& fn, const Resolution& res,
                                   const std::map<std::string, Value>& args,
                                   std::map<std::string, Value> state,
                                   const crypto::Address& sender);

}  // namespace cloak
