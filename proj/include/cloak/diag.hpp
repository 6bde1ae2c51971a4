#pragma once

#include <string>
#include <vector>

#include "cloak/source.hpp"

namespace cloak {

enum class Severity { Error, Warning };

// Stable machine-readable codes; the renderer prints them inside brackets.
namespace diag_code {
inline constexpr const char* parse = "parse";
inline constexpr const char* annotation_syntax = "annotation-syntax";
inline constexpr const char* duplicate_definition = "duplicate-definition";
inline constexpr const char* undeclared_identifier = "undeclared-identifier";
inline constexpr const char* type_mismatch = "type-mismatch";
inline constexpr const char* unsupported_construct = "unsupported-construct";
inline constexpr const char* unresolved_owner = "unresolved-owner";
inline constexpr const char* implicit_flow = "implicit-flow";
}  // namespace diag_code

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Span span;

    static Diagnostic error(std::string code, std::string message, Span span) {
        return {Severity::Error, std::move(code), std::move(message), span};
    }
};

// "file:line:col: severity[code]: message"
std::string render_diagnostic(const SourceBuffer& src, const Diagnostic& d);
std::string render_diagnostics(const SourceBuffer& src, const std::vector<Diagnostic>& ds);

inline bool has_errors(const std::vector<Diagnostic>& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

}  // namespace cloak
