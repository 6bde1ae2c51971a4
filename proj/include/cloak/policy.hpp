#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cloak/analysis.hpp"

namespace cloak {

// One named slot in the policy: a state variable, input, or return value.
// `owner` is an owner string: "all", "me", "tee", "id:<name>", "class:<name>".
// `type` is the bare type ("uint", "address[]", "mapping(address=>uint)", ...).
// An address array that names a party class carries the class in `binds`,
// which is how "class:<name>" owners elsewhere resolve to members.
struct PolicyVar {
    std::string name;
    std::string owner;
    std::string type;
    std::string binds;  // empty unless this slot declares a party class
};

struct PolicyFunction {
    std::string name;
    std::string kind;  // "public" / "private" / "mpt"
    std::vector<PolicyVar> inputs;
    std::vector<PolicyVar> returns;
    std::vector<std::string> read;    // state slots read, sorted
    std::vector<std::string> mutate;  // state slots written, sorted
};

// Machine-readable privacy contract between parties, executor, and chain.
// canonical_bytes() is byte-stable: keys sorted, no whitespace.
struct PrivacyPolicy {
    std::string contract;
    std::vector<PolicyVar> states;
    std::vector<PolicyFunction> functions;

    nlohmann::json to_json() const;
    std::string canonical_bytes() const;
    static PrivacyPolicy from_json(const nlohmann::json& j);

    const PolicyFunction* function(const std::string& name) const;
    const PolicyVar* state(const std::string& name) const;
};

// Derives the policy from a checked contract. Requires cc.ok().
PrivacyPolicy generate_policy(const CheckedContract& cc);

// Owner string for a declaration as the policy records it.
std::string policy_owner_string(const VarDecl& d, const Resolution& res);

}  // namespace cloak
