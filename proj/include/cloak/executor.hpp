#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cloak/interpreter.hpp"
#include "cloak/ledger.hpp"
#include "cloak/policy.hpp"

namespace cloak {

// Box public keys for sealing result payloads, keyed by party address.
class KeyDirectory {
public:
    void add(const crypto::Address& addr, const std::array<uint8_t, 32>& box_pk);
    std::optional<std::array<uint8_t, 32>> find(const crypto::Address& addr) const;

private:
    std::map<crypto::Address, std::array<uint8_t, 32>> keys_;
};

enum class SessionError {
    UnknownContract,
    UnknownFunction,
    NotMpt,
    TooFewParties,
    MissingPublicArg,
    TypeMismatch,
    UnknownSession,
    UnknownParty,
    DuplicateSubmission,
    DecryptFailure,
    NotReady,
    AlreadyExecuted,
    StateDrift,
    Aborted,
};

const char* session_error_name(SessionError e);

struct ProposeOutcome {
    std::optional<SessionError> error;
    std::string session_id;
    std::vector<crypto::Address> expected;  // every participant, sorted
    bool ok() const { return !error; }
};

struct SubmitOutcome {
    std::optional<SessionError> error;
    bool ready = false;  // all private inputs are in
    bool ok() const { return !error; }
};

struct ExecuteOutcome {
    std::optional<SessionError> error;
    std::optional<ResultAnnouncement> announcement;
    std::map<std::string, Value> body_locals;  // enclave-internal, for tests only
    bool ok() const { return !error; }
};

struct ExecutorDeployOutcome {
    std::optional<std::string> error;
    std::string contract_id;
    bool ok() const { return !error; }
};

// TEE-side service: holds the only plaintext copy of confidential state,
// runs multi-party sessions over the annotation-free code, and announces
// commitments plus sealed per-party payloads.
class Executor {
public:
    Executor(crypto::ExecutorKeys keys, const KeyDirectory* directory);

    const crypto::ExecutorKeys& keys() const { return keys_; }
    bool register_on(Ledger& ledger);

    // Takes the published policy and service source as raw bytes; the bytes
    // received are the bytes hashed, so on-chain pins match the compiler's.
    ExecutorDeployOutcome deploy(Ledger& ledger, const std::string& policy_json,
                                 const std::string& service_source,
                                 const std::map<std::string, Value>& fixture);

    ProposeOutcome propose_mpt(const std::string& contract_id, const std::string& function,
                               const crypto::Address& initiator,
                               const std::map<std::string, Value>& public_args);

    // `ciphertext` seals a JSON object {param name: value} covering exactly
    // the party's due slots; a class member sends their own element.
    SubmitOutcome submit_input(const std::string& session_id, const crypto::Address& party,
                               const crypto::Bytes& ciphertext);

    ExecuteOutcome execute_mpt(const std::string& session_id, Ledger& ledger);

    // Inspection hooks for tests and the scenario runner.
    const std::map<std::string, Value>* contract_state(const std::string& contract_id) const;
    std::optional<crypto::StateCommitment> recommit(const std::string& contract_id) const;
    const PrivacyPolicy* contract_policy(const std::string& contract_id) const;

private:
    struct DueSlot {
        const TypeName* type = nullptr;  // element type for class slots
        bool class_element = false;
        size_t index = 0;  // member position within the class
    };

    struct Session {
        std::string contract_id;
        std::string function;
        crypto::Address initiator{};
        std::map<std::string, Value> args;  // public args, later joined by private ones
        std::vector<crypto::Address> expected;
        std::map<std::string, std::vector<crypto::Address>> class_members;
        std::map<crypto::Address, std::map<std::string, DueSlot>> due;
        std::map<crypto::Address, std::map<std::string, Value>> submitted;
        bool executed = false;

        bool ready() const;
    };

    struct Contract {
        PrivacyPolicy policy;
        crypto::Digest policy_hash;
        crypto::Digest code_hash;
        SourceFile service;  // owns the executable tree
        Resolution resolution;
        const ContractDecl* ast = nullptr;
        std::map<std::string, Value> state;
        std::map<std::string, crypto::Nonce> nonces;
        std::map<std::string, crypto::Digest> digests;
        uint64_t version = 0;
        std::array<uint8_t, 32> secret{};
    };

    const FunctionDecl* find_function(const Contract& c, const std::string& name) const;
    crypto::StateCommitment commitment_of(const Contract& c) const;

    crypto::ExecutorKeys keys_;
    const KeyDirectory* directory_;
    std::map<std::string, Contract> contracts_;
    std::map<std::string, Session> sessions_;
    uint64_t session_counter_ = 0;
};

enum class OpenError { NotAParticipant, DecryptFailure, OpeningMismatch };

const char* open_error_name(OpenError e);

struct OpenOutcome {
    std::optional<OpenError> error;
    std::map<std::string, Value> returns;
    bool ok() const { return !error; }
};

// Party-side result recovery: unseal the payload addressed to `keys`,
// re-encode it, and check it against the announced commitment.
OpenOutcome open_result(const crypto::PartyKeys& keys, const ResultAnnouncement& a,
                        const PrivacyPolicy& policy);

}  // namespace cloak
