#pragma once

#include <optional>

#include "cloak/codegen.hpp"
#include "cloak/crypto.hpp"
#include "cloak/policy.hpp"

namespace cloak {

struct CompiledFunction {
    std::string name;
    FunctionKind kind = FunctionKind::Public;
    long check_us = 0;
    long codegen_us = 0;
};

struct CompiledContract {
    const ContractDecl* ast = nullptr;  // points into CompileResult::file
    CheckedContract checked;
    PrivacyPolicy policy;
    std::string policy_bytes;  // canonical form, the hashed artifact
    GeneratedArtifacts artifacts;
    crypto::Digest policy_hash;
    crypto::Digest service_hash;
    crypto::Digest verifier_hash;
    std::vector<CompiledFunction> functions;

    nlohmann::json summary_json() const;
};

struct CompileResult {
    SourceFile file;  // owns the tree every compiled view points into
    std::vector<Diagnostic> diagnostics;
    std::optional<CompiledContract> compiled;

    bool ok() const { return compiled.has_value(); }
};

// Full pipeline: parse, bind, infer owners, classify, emit policy and both
// code targets, hash artifacts. Artifact generation expects exactly one
// contract per file; anything less or more is a diagnostic.
CompileResult compile_source(std::string path, std::string text);
CompileResult compile_file(const std::string& path);

std::optional<std::string> read_text_file(const std::string& path);

// Writes via a temp file and rename, so partial output never lands.
bool write_text_file_atomic(const std::string& path, const std::string& content);

}  // namespace cloak
