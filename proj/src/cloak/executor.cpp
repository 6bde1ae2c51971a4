#include "cloak/executor.hpp"

#include <algorithm>

#include "cloak/parser.hpp"

namespace cloak {

namespace {

std::span<const uint8_t> str_bytes(const std::string& s) {
    return {reinterpret_cast<const uint8_t*>(s.data()), s.size()};
}

crypto::Nonce return_nonce(const std::array<uint8_t, 32>& secret, const std::string& session_id,
                           const crypto::Address& recipient) {
    return crypto::Hasher(crypto::Tag::NonceDerive)
        .bytes(secret)
        .str(session_id)
        .bytes(recipient)
        .finish()
        .v;
}

crypto::Nonce slot_nonce(const std::array<uint8_t, 32>& secret, const std::string& contract_id,
                         uint64_t version, const std::string& slot) {
    return crypto::Hasher(crypto::Tag::NonceDerive)
        .bytes(secret)
        .str(contract_id)
        .u64be(version)
        .u32be(static_cast<uint32_t>(slot.size()))
        .str(slot)
        .finish()
        .v;
}

}  // namespace

const char* session_error_name(SessionError e) {
    switch (e) {
        case SessionError::UnknownContract: return "UnknownContract";
        case SessionError::UnknownFunction: return "UnknownFunction";
        case SessionError::NotMpt: return "NotMpt";
        case SessionError::TooFewParties: return "TooFewParties";
        case SessionError::MissingPublicArg: return "MissingPublicArg";
        case SessionError::TypeMismatch: return "TypeMismatch";
        case SessionError::UnknownSession: return "UnknownSession";
        case SessionError::UnknownParty: return "UnknownParty";
        case SessionError::DuplicateSubmission: return "DuplicateSubmission";
        case SessionError::DecryptFailure: return "DecryptFailure";
        case SessionError::NotReady: return "NotReady";
        case SessionError::AlreadyExecuted: return "AlreadyExecuted";
        case SessionError::StateDrift: return "StateDrift";
        case SessionError::Aborted: return "Aborted";
    }
    return "?";
}

const char* open_error_name(OpenError e) {
    switch (e) {
        case OpenError::NotAParticipant: return "NotAParticipant";
        case OpenError::DecryptFailure: return "DecryptFailure";
        case OpenError::OpeningMismatch: return "OpeningMismatch";
    }
    return "?";
}

void KeyDirectory::add(const crypto::Address& addr, const std::array<uint8_t, 32>& box_pk) {
    keys_[addr] = box_pk;
}

std::optional<std::array<uint8_t, 32>> KeyDirectory::find(const crypto::Address& addr) const {
    auto it = keys_.find(addr);
    if (it == keys_.end()) return std::nullopt;
    return it->second;
}

bool Executor::Session::ready() const {
    for (const auto& [party, slots] : due)
        if (!slots.empty() && !submitted.count(party)) return false;
    return true;
}

Executor::Executor(crypto::ExecutorKeys keys, const KeyDirectory* directory)
    : keys_(std::move(keys)), directory_(directory) {}

bool Executor::register_on(Ledger& ledger) {
    return ledger.register_worker(crypto::mock_attest(keys_)).ok();
}

ExecutorDeployOutcome Executor::deploy(Ledger& ledger, const std::string& policy_json,
                                       const std::string& service_source,
                                       const std::map<std::string, Value>& fixture) {
    ExecutorDeployOutcome out;
    Contract c;
    try {
        c.policy = PrivacyPolicy::from_json(nlohmann::json::parse(policy_json));
    } catch (const std::exception& e) {
        out.error = std::string("bad policy: ") + e.what();
        return out;
    }

    c.service = parse_source("service.sol", service_source);
    if (has_errors(c.service.diagnostics) || c.service.contracts.size() != 1) {
        out.error = "service source does not parse as a single contract";
        return out;
    }
    c.ast = c.service.contracts.front().get();
    std::vector<Diagnostic> diags;
    c.resolution = resolve_contract(*c.ast, diags);
    if (has_errors(diags)) {
        out.error = "service source failed validation";
        return out;
    }
    if (c.ast->name != c.policy.contract) {
        out.error = "policy and service name different contracts";
        return out;
    }

    for (const auto& [name, value] : fixture) {
        const PolicyVar* pv = c.policy.state(name);
        if (!pv) {
            out.error = "fixture names unknown state slot '" + name + "'";
            return out;
        }
    }
    std::vector<std::pair<std::string, crypto::Digest>> slot_digests;
    for (const auto& sv : c.ast->state_vars) {
        auto it = fixture.find(sv.name);
        Value v = it != fixture.end() ? it->second : default_value(sv.type);
        if (!value_matches_type(v, sv.type)) {
            out.error = "fixture value for '" + sv.name + "' has the wrong type";
            return out;
        }
        crypto::Nonce zero{};
        crypto::Digest d = crypto::commit_bytes(encode_value(v), zero).digest;
        c.state.emplace(sv.name, std::move(v));
        c.nonces.emplace(sv.name, zero);
        c.digests.emplace(sv.name, d);
        slot_digests.emplace_back(sv.name, d);
    }

    c.policy_hash = crypto::sha256_tagged(crypto::Tag::Policy, str_bytes(policy_json));
    c.code_hash = crypto::sha256_tagged(crypto::Tag::Code, str_bytes(service_source));

    auto deployed = ledger.deploy(keys_.address, c.policy_hash, c.code_hash,
                                  crypto::commit_state(std::move(slot_digests)));
    if (!deployed.ok()) {
        out.error = "ledger rejected deployment: " + std::string(deploy_error_name(*deployed.error));
        return out;
    }
    out.contract_id = deployed.contract_id;
    c.secret = crypto::Hasher(crypto::Tag::SeedDerive)
                   .bytes(std::span<const uint8_t>(keys_.sign.sk).first(32))
                   .str("contract")
                   .str(out.contract_id)
                   .finish()
                   .v;
    contracts_.emplace(out.contract_id, std::move(c));
    return out;
}

const FunctionDecl* Executor::find_function(const Contract& c, const std::string& name) const {
    for (const auto& f : c.ast->functions)
        if (f->name == name) return f.get();
    return nullptr;
}

crypto::StateCommitment Executor::commitment_of(const Contract& c) const {
    std::vector<std::pair<std::string, crypto::Digest>> pairs(c.digests.begin(), c.digests.end());
    return crypto::commit_state(std::move(pairs));
}

ProposeOutcome Executor::propose_mpt(const std::string& contract_id, const std::string& function,
                                     const crypto::Address& initiator,
                                     const std::map<std::string, Value>& public_args) {
    ProposeOutcome out;
    auto cit = contracts_.find(contract_id);
    if (cit == contracts_.end()) {
        out.error = SessionError::UnknownContract;
        return out;
    }
    Contract& c = cit->second;
    const PolicyFunction* pf = c.policy.function(function);
    const FunctionDecl* fn = find_function(c, function);
    if (!pf || !fn || fn->params.size() != pf->inputs.size()) {
        out.error = SessionError::UnknownFunction;
        return out;
    }
    if (pf->kind != "mpt") {
        out.error = SessionError::NotMpt;
        return out;
    }

    Session s;
    s.contract_id = contract_id;
    s.function = function;
    s.initiator = initiator;

    // Public arguments first; class membership and id owners resolve against them.
    for (size_t i = 0; i < pf->inputs.size(); ++i) {
        const PolicyVar& in = pf->inputs[i];
        if (in.owner != "all") continue;
        auto it = public_args.find(in.name);
        if (it == public_args.end()) {
            out.error = SessionError::MissingPublicArg;
            return out;
        }
        if (!value_matches_type(it->second, fn->params[i].type)) {
            out.error = SessionError::TypeMismatch;
            return out;
        }
        s.args.emplace(in.name, it->second);
        if (!in.binds.empty()) {
            std::vector<crypto::Address> members;
            for (const Value& m : it->second.elems) members.push_back(m.addr);
            s.class_members.emplace(in.binds, std::move(members));
        }
    }

    for (size_t i = 0; i < pf->inputs.size(); ++i) {
        const PolicyVar& in = pf->inputs[i];
        const TypeName& ty = fn->params[i].type;
        if (in.owner == "all") continue;
        if (in.owner.rfind("class:", 0) == 0) {
            auto cm = s.class_members.find(in.owner.substr(6));
            if (cm == s.class_members.end() || ty.kind != TypeKind::Array) {
                out.error = SessionError::TypeMismatch;
                return out;
            }
            for (size_t m = 0; m < cm->second.size(); ++m)
                s.due[cm->second[m]].emplace(in.name, DueSlot{ty.elem.get(), true, m});
        } else if (in.owner.rfind("id:", 0) == 0) {
            auto owner_arg = s.args.find(in.owner.substr(3));
            if (owner_arg == s.args.end()) {
                out.error = SessionError::MissingPublicArg;
                return out;
            }
            if (owner_arg->second.kind != Value::Kind::Address) {
                out.error = SessionError::TypeMismatch;
                return out;
            }
            s.due[owner_arg->second.addr].emplace(in.name, DueSlot{&ty, false, 0});
        } else {  // "me" and anything the policy leaves to the caller
            s.due[initiator].emplace(in.name, DueSlot{&ty, false, 0});
        }
    }

    std::vector<crypto::Address> expected;
    expected.push_back(initiator);
    for (const auto& [cls, members] : s.class_members)
        expected.insert(expected.end(), members.begin(), members.end());
    for (const auto& [party, slots] : s.due) expected.push_back(party);
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    if (expected.size() < 2) {
        out.error = SessionError::TooFewParties;
        return out;
    }
    s.expected = expected;

    out.session_id = crypto::Hasher(crypto::Tag::SessionId)
                         .str("session")
                         .str(contract_id)
                         .str(function)
                         .bytes(initiator)
                         .u64be(session_counter_++)
                         .finish()
                         .hex();
    out.expected = std::move(expected);
    sessions_.emplace(out.session_id, std::move(s));
    return out;
}

SubmitOutcome Executor::submit_input(const std::string& session_id, const crypto::Address& party,
                                     const crypto::Bytes& ciphertext) {
    SubmitOutcome out;
    auto sit = sessions_.find(session_id);
    if (sit == sessions_.end()) {
        out.error = SessionError::UnknownSession;
        return out;
    }
    Session& s = sit->second;
    auto dit = s.due.find(party);
    if (dit == s.due.end() || dit->second.empty()) {
        out.error = SessionError::UnknownParty;
        return out;
    }
    if (s.submitted.count(party)) {
        out.error = SessionError::DuplicateSubmission;
        out.ready = s.ready();
        return out;
    }

    auto plain = crypto::seal_open(keys_.box, ciphertext);
    if (!plain) {
        out.error = SessionError::DecryptFailure;
        return out;
    }
    nlohmann::json j = nlohmann::json::parse(plain->begin(), plain->end(), nullptr, false);
    if (!j.is_object() || j.size() != dit->second.size()) {
        out.error = SessionError::TypeMismatch;
        return out;
    }
    std::map<std::string, Value> values;
    for (const auto& [name, slot] : dit->second) {
        auto field = j.find(name);
        if (field == j.end()) {
            out.error = SessionError::TypeMismatch;
            return out;
        }
        auto v = value_from_json(*field, *slot.type);
        if (!v) {
            out.error = SessionError::TypeMismatch;
            return out;
        }
        values.emplace(name, std::move(*v));
    }
    s.submitted.emplace(party, std::move(values));
    out.ready = s.ready();
    return out;
}

ExecuteOutcome Executor::execute_mpt(const std::string& session_id, Ledger& ledger) {
    ExecuteOutcome out;
    auto sit = sessions_.find(session_id);
    if (sit == sessions_.end()) {
        out.error = SessionError::UnknownSession;
        return out;
    }
    Session& s = sit->second;
    if (s.executed) {
        out.error = SessionError::AlreadyExecuted;
        return out;
    }
    if (!s.ready()) {
        out.error = SessionError::NotReady;
        return out;
    }
    Contract& c = contracts_.at(s.contract_id);
    const FunctionDecl* fn = find_function(c, s.function);
    const PolicyFunction* pf = c.policy.function(s.function);

    crypto::StateCommitment old_state = commitment_of(c);
    auto ledger_root = ledger.current_root(s.contract_id);
    if (!ledger_root || *ledger_root != old_state.root) {
        out.error = SessionError::StateDrift;
        return out;
    }

    // Join private inputs into the argument map; class elements in member order.
    std::map<std::string, Value> args = s.args;
    for (const auto& [party, values] : s.submitted) {
        for (const auto& [name, v] : values) {
            const DueSlot& slot = s.due.at(party).at(name);
            if (slot.class_element) {
                Value& arr = args[name];
                if (arr.kind != Value::Kind::Array) arr = Value::array({});
                if (arr.elems.size() <= slot.index) arr.elems.resize(slot.index + 1);
                arr.elems[slot.index] = v;
            } else {
                args[name] = v;
            }
        }
    }

    s.executed = true;
    InterpretResult run;
    try {
        run = interpret_function(*fn, c.resolution, args, c.state, s.initiator);
    } catch (const RuntimeError&) {
        out.error = SessionError::Aborted;
        return out;
    }

    // Route each return to its entitled recipients.
    std::map<std::string, Value> returns;
    for (auto& [name, v] : run.returns) returns.emplace(name, std::move(v));
    std::map<crypto::Address, std::vector<std::pair<std::string, Value>>> routed;
    for (const auto& addr : s.expected) routed[addr];
    for (const auto& rv : pf->returns) {
        auto vit = returns.find(rv.name);
        if (vit == returns.end()) continue;
        const Value& v = vit->second;
        if (rv.owner == "all") {
            for (const auto& addr : s.expected) routed[addr].emplace_back(rv.name, v);
        } else if (rv.owner == "me") {
            routed[s.initiator].emplace_back(rv.name, v);
        } else if (rv.owner.rfind("id:", 0) == 0) {
            std::string target = rv.owner.substr(3);
            const Value* tv = nullptr;
            if (auto r = returns.find(target); r != returns.end()) tv = &r->second;
            if (!tv)
                if (auto a = args.find(target); a != args.end()) tv = &a->second;
            if (!tv)
                if (auto st = run.state.find(target); st != run.state.end()) tv = &st->second;
            if (tv && tv->kind == Value::Kind::Address) routed[tv->addr].emplace_back(rv.name, v);
        } else if (rv.owner.rfind("class:", 0) == 0) {
            auto cm = s.class_members.find(rv.owner.substr(6));
            if (cm == s.class_members.end() || v.kind != Value::Kind::Array) continue;
            for (size_t m = 0; m < cm->second.size() && m < v.elems.size(); ++m)
                routed[cm->second[m]].emplace_back(rv.name, v.elems[m]);
        }  // "tee": stays inside the enclave
    }

    ResultAnnouncement a;
    a.contract_id = s.contract_id;
    a.function = s.function;
    a.session_id = session_id;
    a.executor = keys_.address;
    a.teemr = keys_.teemr;
    a.policy_hash = c.policy_hash;
    a.code_hash = c.code_hash;
    a.old_root = old_state.root;

    for (const auto& [addr, fields] : routed) {
        crypto::Nonce nonce = return_nonce(c.secret, session_id, addr);
        crypto::Commitment commitment = crypto::commit_bytes(encode_record(fields), nonce);
        a.return_commitments.emplace_back(addr, commitment);

        auto box_pk = directory_ ? directory_->find(addr) : std::nullopt;
        if (!box_pk) continue;  // commitment still binds; the party cannot open
        nlohmann::json payload;
        payload["nonce"] = crypto::hex_encode(nonce);
        payload["returns"] = nlohmann::json::object();
        for (const auto& [name, v] : fields) payload["returns"][name] = value_to_json(v);
        std::string bytes = payload.dump();
        a.payloads.emplace(addr, crypto::seal(*box_pk, str_bytes(bytes)));
    }

    uint64_t new_version = c.version + 1;
    std::map<std::string, crypto::Nonce> new_nonces = c.nonces;
    std::map<std::string, crypto::Digest> new_digests = c.digests;
    for (const auto& slot : run.written) {
        crypto::Nonce nonce = slot_nonce(c.secret, s.contract_id, new_version, slot);
        new_nonces[slot] = nonce;
        new_digests[slot] = crypto::commit_bytes(encode_value(run.state.at(slot)), nonce).digest;
    }
    std::vector<std::pair<std::string, crypto::Digest>> pairs(new_digests.begin(),
                                                              new_digests.end());
    a.new_state = crypto::commit_state(std::move(pairs));

    std::vector<std::pair<crypto::Address, crypto::Digest>> rc;
    for (const auto& [addr, commitment] : a.return_commitments)
        rc.emplace_back(addr, commitment.digest);
    crypto::Digest signed_digest =
        crypto::proof_digest(a.policy_hash, a.code_hash, a.old_root, rc, a.new_state.root);
    a.proof = crypto::sign_detached(keys_.sign, signed_digest.v);

    c.state = std::move(run.state);
    c.nonces = std::move(new_nonces);
    c.digests = std::move(new_digests);
    c.version = new_version;

    out.announcement = std::move(a);
    out.body_locals = std::move(run.body_locals);
    return out;
}

const std::map<std::string, Value>* Executor::contract_state(const std::string& contract_id) const {
    auto it = contracts_.find(contract_id);
    return it == contracts_.end() ? nullptr : &it->second.state;
}

std::optional<crypto::StateCommitment> Executor::recommit(const std::string& contract_id) const {
    auto it = contracts_.find(contract_id);
    if (it == contracts_.end()) return std::nullopt;
    return commitment_of(it->second);
}

const PrivacyPolicy* Executor::contract_policy(const std::string& contract_id) const {
    auto it = contracts_.find(contract_id);
    return it == contracts_.end() ? nullptr : &it->second.policy;
}

OpenOutcome open_result(const crypto::PartyKeys& keys, const ResultAnnouncement& a,
                        const PrivacyPolicy& policy) {
    OpenOutcome out;
    const crypto::Commitment* commitment = nullptr;
    for (const auto& [addr, c] : a.return_commitments)
        if (addr == keys.address) commitment = &c;
    auto payload = a.payloads.find(keys.address);
    if (!commitment || payload == a.payloads.end()) {
        out.error = OpenError::NotAParticipant;
        return out;
    }
    auto plain = crypto::seal_open(keys.box, payload->second);
    if (!plain) {
        out.error = OpenError::DecryptFailure;
        return out;
    }

    nlohmann::json j = nlohmann::json::parse(plain->begin(), plain->end(), nullptr, false);
    const PolicyFunction* pf = policy.function(a.function);
    if (!j.is_object() || !j.contains("nonce") || !j.contains("returns") || !pf) {
        out.error = OpenError::OpeningMismatch;
        return out;
    }
    auto nonce_bytes = crypto::hex_decode(j["nonce"].get<std::string>());
    if (!nonce_bytes || nonce_bytes->size() != 32) {
        out.error = OpenError::OpeningMismatch;
        return out;
    }
    crypto::Nonce nonce;
    std::copy(nonce_bytes->begin(), nonce_bytes->end(), nonce.begin());

    std::vector<std::pair<std::string, Value>> fields;
    for (const auto& [name, jval] : j["returns"].items()) {
        const PolicyVar* rv = nullptr;
        for (const auto& r : pf->returns)
            if (r.name == name) rv = &r;
        if (!rv) {
            out.error = OpenError::OpeningMismatch;
            return out;
        }
        auto ty = parse_bare_type(rv->type);
        if (!ty) {
            out.error = OpenError::OpeningMismatch;
            return out;
        }
        // Class-owned returns arrive as a single element of the array type.
        const TypeName* decode_ty = &*ty;
        if (rv->owner.rfind("class:", 0) == 0 && ty->kind == TypeKind::Array)
            decode_ty = ty->elem.get();
        auto v = value_from_json(jval, *decode_ty);
        if (!v) {
            out.error = OpenError::OpeningMismatch;
            return out;
        }
        fields.emplace_back(name, std::move(*v));
    }
    if (!crypto::verify_commitment(*commitment, encode_record(fields), nonce)) {
        out.error = OpenError::OpeningMismatch;
        return out;
    }
    for (auto& [name, v] : fields) out.returns.emplace(name, std::move(v));
    return out;
}

}  // namespace cloak
