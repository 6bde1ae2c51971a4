#pragma once

#include <map>
#include <mutex>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "cloak/crypto.hpp"

namespace cloak {

// Public record of one confidential execution. Everything here lands on the
// ledger in the clear: commitments, hashes, the proof, and the sealed
// per-party payloads. No plaintext inputs, outputs, or state.
struct ResultAnnouncement {
    std::string contract_id;
    std::string function;
    std::string session_id;
    crypto::Address executor{};
    crypto::Digest teemr;
    crypto::Digest policy_hash;
    crypto::Digest code_hash;
    crypto::Digest old_root;
    std::vector<std::pair<crypto::Address, crypto::Commitment>> return_commitments;  // sorted
    crypto::StateCommitment new_state;
    std::array<uint8_t, 64> proof{};
    std::map<crypto::Address, crypto::Bytes> payloads;  // sealed, per recipient

    nlohmann::json to_json() const;
};

enum class RegisterError { BadReport, KeyMismatch, Duplicate };
enum class DeployError { UnregisteredExecutor };
enum class VerifyError { UnregisteredSigner, UnknownContract, HashMismatch, StaleState, BadSignature };

const char* register_error_name(RegisterError e);
const char* deploy_error_name(DeployError e);
const char* verify_error_name(VerifyError e);

struct RegisterOutcome {
    std::optional<RegisterError> error;
    crypto::Address worker_id{};
    bool ok() const { return !error; }
};

struct DeployOutcome {
    std::optional<DeployError> error;
    std::string contract_id;
    bool ok() const { return !error; }
};

struct VerifyOutcome {
    std::optional<VerifyError> error;
    bool ok() const { return !error; }
};

// In-process chain: worker registry, deployments, and an append-only event
// log. Checks run in a fixed order so rejections are deterministic.
class Ledger {
public:
    RegisterOutcome register_worker(const crypto::RegisterData& rd);
    DeployOutcome deploy(const crypto::Address& executor, const crypto::Digest& policy_hash,
                         const crypto::Digest& code_hash, crypto::StateCommitment initial);
    VerifyOutcome verify_and_update(const ResultAnnouncement& a);

    std::optional<crypto::RegisterData> worker(const crypto::Address& id) const;
    std::optional<crypto::Digest> current_root(const std::string& contract_id) const;
    std::optional<crypto::StateCommitment> current_state(const std::string& contract_id) const;

    // Everything an observer of the chain sees, in order.
    nlohmann::json export_json() const;
    size_t event_count() const;

private:
    struct Deployment {
        crypto::Address executor{};
        crypto::Digest policy_hash;
        crypto::Digest code_hash;
        crypto::StateCommitment state;
        uint64_t version = 0;
    };

    void append(std::string type, nlohmann::json fields);

    mutable std::mutex mu_;
    std::map<crypto::Address, crypto::RegisterData> workers_;
    std::map<std::string, Deployment> deployments_;
    uint64_t deploy_counter_ = 0;
    std::vector<nlohmann::json> log_;
};

}  // namespace cloak
