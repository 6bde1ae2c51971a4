#include "cloak/ledger.hpp"

#include <algorithm>

namespace cloak {

namespace {

std::string addr_hex(const crypto::Address& a) { return crypto::hex_encode(a); }

nlohmann::json slots_json(const crypto::StateCommitment& sc) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [name, digest] : sc.slots) j[name] = digest.hex();
    return j;
}

}  // namespace

const char* register_error_name(RegisterError e) {
    switch (e) {
        case RegisterError::BadReport: return "BadReport";
        case RegisterError::KeyMismatch: return "KeyMismatch";
        case RegisterError::Duplicate: return "Duplicate";
    }
    return "?";
}

const char* deploy_error_name(DeployError e) {
    switch (e) {
        case DeployError::UnregisteredExecutor: return "UnregisteredExecutor";
    }
    return "?";
}

const char* verify_error_name(VerifyError e) {
    switch (e) {
        case VerifyError::UnregisteredSigner: return "UnregisteredSigner";
        case VerifyError::UnknownContract: return "UnknownContract";
        case VerifyError::HashMismatch: return "HashMismatch";
        case VerifyError::StaleState: return "StaleState";
        case VerifyError::BadSignature: return "BadSignature";
    }
    return "?";
}

nlohmann::json ResultAnnouncement::to_json() const {
    nlohmann::json rc = nlohmann::json::object();
    for (const auto& [addr, commitment] : return_commitments)
        rc[addr_hex(addr)] = commitment.digest.hex();
    nlohmann::json pl = nlohmann::json::object();
    for (const auto& [addr, ct] : payloads) pl[addr_hex(addr)] = crypto::hex_encode(ct);
    return {{"contract", contract_id},
            {"function", function},
            {"session", session_id},
            {"executor", addr_hex(executor)},
            {"teemr", teemr.hex()},
            {"policyHash", policy_hash.hex()},
            {"codeHash", code_hash.hex()},
            {"oldRoot", old_root.hex()},
            {"returnCommitments", std::move(rc)},
            {"newRoot", new_state.root.hex()},
            {"slots", slots_json(new_state)},
            {"proof", crypto::hex_encode(proof)},
            {"payloads", std::move(pl)}};
}

RegisterOutcome Ledger::register_worker(const crypto::RegisterData& rd) {
    std::lock_guard lock(mu_);
    RegisterOutcome out;
    bool measured = std::find(rd.teemrs.begin(), rd.teemrs.end(), rd.report.mrenclave) !=
                    rd.teemrs.end();
    if (!crypto::ias_verify(rd.report) || rd.report.quote_status != "OK" || !measured) {
        out.error = RegisterError::BadReport;
    } else if (crypto::report_data_binding(rd.ver_key, rd.enc_key) != rd.report.report_data) {
        out.error = RegisterError::KeyMismatch;
    } else {
        out.worker_id = crypto::address_from_verkey(rd.ver_key);
        if (workers_.count(out.worker_id))
            out.error = RegisterError::Duplicate;
        else
            workers_.emplace(out.worker_id, rd);
    }
    nlohmann::json fields = {{"verKey", crypto::hex_encode(rd.ver_key)},
                             {"encKey", crypto::hex_encode(rd.enc_key)},
                             {"report", rd.report.to_json_string()}};
    fields["outcome"] = out.ok() ? "accepted" : register_error_name(*out.error);
    if (out.ok()) fields["workerId"] = addr_hex(out.worker_id);
    append("register", std::move(fields));
    return out;
}

DeployOutcome Ledger::deploy(const crypto::Address& executor, const crypto::Digest& policy_hash,
                             const crypto::Digest& code_hash, crypto::StateCommitment initial) {
    std::lock_guard lock(mu_);
    DeployOutcome out;
    if (!workers_.count(executor)) {
        out.error = DeployError::UnregisteredExecutor;
        append("deploy", {{"executor", addr_hex(executor)}, {"outcome", "UnregisteredExecutor"}});
        return out;
    }
    out.contract_id = crypto::Hasher(crypto::Tag::SessionId)
                          .str("deploy")
                          .bytes(executor)
                          .bytes(policy_hash.v)
                          .bytes(code_hash.v)
                          .u64be(deploy_counter_++)
                          .finish()
                          .hex();
    nlohmann::json fields = {{"contract", out.contract_id},
                             {"executor", addr_hex(executor)},
                             {"policyHash", policy_hash.hex()},
                             {"codeHash", code_hash.hex()},
                             {"root", initial.root.hex()},
                             {"slots", slots_json(initial)},
                             {"outcome", "accepted"}};
    deployments_.emplace(out.contract_id,
                         Deployment{executor, policy_hash, code_hash, std::move(initial), 0});
    append("deploy", std::move(fields));
    return out;
}

VerifyOutcome Ledger::verify_and_update(const ResultAnnouncement& a) {
    std::lock_guard lock(mu_);
    VerifyOutcome out;

    auto worker = workers_.find(a.executor);
    auto dep = deployments_.find(a.contract_id);
    if (worker == workers_.end() || a.teemr != worker->second.report.mrenclave) {
        out.error = VerifyError::UnregisteredSigner;
    } else if (dep == deployments_.end()) {
        out.error = VerifyError::UnknownContract;
    } else if (a.policy_hash != dep->second.policy_hash || a.code_hash != dep->second.code_hash) {
        out.error = VerifyError::HashMismatch;
    } else if (a.old_root != dep->second.state.root) {
        out.error = VerifyError::StaleState;
    } else {
        std::vector<std::pair<crypto::Address, crypto::Digest>> rc;
        rc.reserve(a.return_commitments.size());
        for (const auto& [addr, commitment] : a.return_commitments)
            rc.emplace_back(addr, commitment.digest);
        crypto::Digest signed_digest =
            crypto::proof_digest(a.policy_hash, a.code_hash, a.old_root, rc, a.new_state.root);
        if (!crypto::verify_detached(worker->second.ver_key, signed_digest.v, a.proof))
            out.error = VerifyError::BadSignature;
    }

    nlohmann::json fields = a.to_json();
    fields["outcome"] = out.ok() ? "accepted" : verify_error_name(*out.error);
    append("announce", std::move(fields));

    if (out.ok()) {
        dep->second.state = a.new_state;
        ++dep->second.version;
    }
    return out;
}

std::optional<crypto::RegisterData> Ledger::worker(const crypto::Address& id) const {
    std::lock_guard lock(mu_);
    auto it = workers_.find(id);
    if (it == workers_.end()) return std::nullopt;
    return it->second;
}

std::optional<crypto::Digest> Ledger::current_root(const std::string& contract_id) const {
    std::lock_guard lock(mu_);
    auto it = deployments_.find(contract_id);
    if (it == deployments_.end()) return std::nullopt;
    return it->second.state.root;
}

std::optional<crypto::StateCommitment> Ledger::current_state(const std::string& contract_id) const {
    std::lock_guard lock(mu_);
    auto it = deployments_.find(contract_id);
    if (it == deployments_.end()) return std::nullopt;
    return it->second.state;
}

nlohmann::json Ledger::export_json() const {
    std::lock_guard lock(mu_);
    return log_;
}

size_t Ledger::event_count() const {
    std::lock_guard lock(mu_);
    return log_.size();
}

void Ledger::append(std::string type, nlohmann::json fields) {
    fields["type"] = std::move(type);
    log_.push_back(std::move(fields));
}

}  // namespace cloak
