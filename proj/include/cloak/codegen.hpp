#pragma once

#include <map>
#include <string>

#include "cloak/analysis.hpp"
#include "cloak/policy.hpp"

namespace cloak {

struct GeneratedArtifacts {
    std::string service_source;   // annotation-free contract executed inside the enclave
    std::string verifier_source;  // on-chain verifier plus the shared service registry
    std::map<std::string, long> codegen_us;  // per-function generation time
};

// Emits both targets from a checked contract and its policy. Both outputs
// parse back through the frontend without diagnostics.
GeneratedArtifacts generate_artifacts(const CheckedContract& cc, const PrivacyPolicy& policy,
                                      const std::string& pragma_version = "0.5.17");

}  // namespace cloak
