#include "cloak/codegen.hpp"

#include <chrono>
#include <set>
#include <sstream>

#include "cloak/pretty.hpp"
#include "cloak/strip.hpp"

namespace cloak {

namespace {

// Shared registry contract: workers attest once, proofs verify against the
// registered measurement. The simulator performs the real checks; on chain
// this stub only pins the call shape.
const char* kServiceContract =
    "contract CloakService {\n"
    "    function registerWorker(address workerId, uint[] deviceInfo) public {\n"
    "    }\n"
    "\n"
    "    function verify(uint[] proof, uint teemr, uint codeHash, uint policyHash, "
    "uint functionHash, uint oldStateHash) public returns (bool ok) {\n"
    "        ok = proof.length > 0;\n"
    "    }\n"
    "}\n";

std::string verify_entry(const std::string& fn_name) {
    std::ostringstream os;
    os << "    function verify_" << fn_name
       << "(uint[] proof, uint codeHash, uint policyHash, uint oldStateHash, "
          "uint newStateHash, uint[] returnCommitments) public returns (bool accepted) {\n"
          "        accepted = false;\n"
          "        if (codeHash == codeCommitment && policyHash == policyCommitment && "
          "oldStateHash == stateRoot && proof.length > 0) {\n"
          "            stateRoot = newStateHash;\n"
          "            accepted = true;\n"
          "        }\n"
          "    }\n";
    return os.str();
}

long elapsed_us(std::chrono::steady_clock::time_point start) {
    return static_cast<long>(std::chrono::duration_cast<std::chrono::microseconds>(
                                 std::chrono::steady_clock::now() - start)
                                 .count());
}

}  // namespace

GeneratedArtifacts generate_artifacts(const CheckedContract& cc, const PrivacyPolicy& policy,
                                      const std::string& pragma_version) {
    const ContractDecl& c = *cc.contract;
    GeneratedArtifacts out;

    NodeCounter ids;
    auto stripped = strip_contract(c, ids);
    std::string pragma_line = "pragma solidity " + pragma_version + ";\n\n";
    out.service_source = pragma_line + pretty_contract(*stripped);

    // State slots that on-chain passthrough functions still touch directly.
    std::set<std::string> plain_state;
    for (const auto& f : policy.functions) {
        if (f.kind == "mpt") continue;
        plain_state.insert(f.read.begin(), f.read.end());
        plain_state.insert(f.mutate.begin(), f.mutate.end());
    }

    std::ostringstream v;
    v << pragma_line << kServiceContract << '\n';
    v << "contract " << c.name << "Verifier {\n";
    v << "    uint policyCommitment;\n";
    v << "    uint codeCommitment;\n";
    v << "    uint stateRoot;\n";
    for (const auto& sv : stripped->state_vars) v << "    uint commit_" << sv.name << ";\n";
    for (const auto& sv : stripped->state_vars)
        if (plain_state.count(sv.name)) v << "    " << pretty_type(sv.type) << ' ' << sv.name << ";\n";

    for (size_t i = 0; i < cc.functions.size(); ++i) {
        const FunctionAnalysis& fa = cc.functions[i];
        auto start = std::chrono::steady_clock::now();
        std::string snippet = fa.kind == FunctionKind::Mpt
                                  ? verify_entry(fa.fn->name)
                                  : pretty_function(*stripped->functions[i], 1);
        out.codegen_us[fa.fn->name] = elapsed_us(start);
        v << '\n' << snippet;
    }
    v << "}\n";
    out.verifier_source = v.str();
    return out;
}

}  // namespace cloak
