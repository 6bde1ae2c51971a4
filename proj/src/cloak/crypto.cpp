#include "cloak/crypto.hpp"

#include <sodium.h>

#include <algorithm>
#include <cassert>
#include <mutex>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace cloak::crypto {

namespace {

void ensure_sodium() {
    static std::once_flag once;
    std::call_once(once, [] {
        if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
    });
}

crypto_hash_sha256_state* state_of(std::array<uint8_t, 128>& storage) {
    static_assert(sizeof(crypto_hash_sha256_state) <= 128);
    return reinterpret_cast<crypto_hash_sha256_state*>(storage.data());
}

}  // namespace

std::string hex_encode(std::span<const uint8_t> data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (uint8_t b : data) {
        out += digits[b >> 4];
        out += digits[b & 0xf];
    }
    return out;
}

std::optional<Bytes> hex_decode(std::string_view hex) {
    if (hex.size() % 2) return std::nullopt;
    auto nibble = [](char c) -> int {
        if (c >= '0' && c <= '9') return c - '0';
        if (c >= 'a' && c <= 'f') return c - 'a' + 10;
        if (c >= 'A' && c <= 'F') return c - 'A' + 10;
        return -1;
    };
    Bytes out;
    out.reserve(hex.size() / 2);
    for (size_t i = 0; i < hex.size(); i += 2) {
        int hi = nibble(hex[i]), lo = nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(static_cast<uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::optional<Digest> Digest::from_hex(std::string_view hex) {
    auto b = hex_decode(hex);
    if (!b || b->size() != 32) return std::nullopt;
    Digest d;
    std::copy(b->begin(), b->end(), d.v.begin());
    return d;
}

Hasher::Hasher(Tag tag) {
    ensure_sodium();
    crypto_hash_sha256_init(state_of(state_));
    byte(static_cast<uint8_t>(tag));
}

Hasher& Hasher::bytes(std::span<const uint8_t> data) {
    crypto_hash_sha256_update(state_of(state_), data.data(), data.size());
    return *this;
}

Hasher& Hasher::str(std::string_view s) {
    crypto_hash_sha256_update(state_of(state_), reinterpret_cast<const uint8_t*>(s.data()),
                              s.size());
    return *this;
}

Hasher& Hasher::byte(uint8_t b) { return bytes({&b, 1}); }

Hasher& Hasher::u32be(uint32_t n) {
    uint8_t b[4] = {static_cast<uint8_t>(n >> 24), static_cast<uint8_t>(n >> 16),
                    static_cast<uint8_t>(n >> 8), static_cast<uint8_t>(n)};
    return bytes(b);
}

Hasher& Hasher::u64be(uint64_t n) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(n >> (56 - 8 * i));
    return bytes(b);
}

Digest Hasher::finish() {
    Digest d;
    crypto_hash_sha256_final(state_of(state_), d.v.data());
    return d;
}

Digest sha256_tagged(Tag tag, std::span<const uint8_t> data) {
    return Hasher(tag).bytes(data).finish();
}

// ---- keys -------------------------------------------------------------------

Address address_from_verkey(const std::array<uint8_t, 32>& verkey) {
    Digest d = Hasher(Tag::AddressDerive).bytes(verkey).finish();
    Address a;
    std::copy_n(d.v.begin(), a.size(), a.begin());
    return a;
}

std::array<uint8_t, 32> derive_seed(std::string_view label) {
    return Hasher(Tag::SeedDerive).str(label).finish().v;
}

PartyKeys PartyKeys::from_seed(const std::array<uint8_t, 32>& seed) {
    ensure_sodium();
    PartyKeys k;
    crypto_sign_seed_keypair(k.sign.pk.data(), k.sign.sk.data(), seed.data());
    auto box_seed = Hasher(Tag::SeedDerive).bytes(seed).str("box").finish();
    crypto_box_seed_keypair(k.box.pk.data(), k.box.sk.data(), box_seed.v.data());
    k.address = address_from_verkey(k.sign.pk);
    return k;
}

ExecutorKeys ExecutorKeys::from_seed(const std::array<uint8_t, 32>& seed) {
    PartyKeys p = PartyKeys::from_seed(seed);
    ExecutorKeys k;
    k.sign = p.sign;
    k.box = p.box;
    k.address = p.address;
    k.teemr = runtime_teemr();
    return k;
}

// ---- sealed boxes and signatures ---------------------------------------------

Bytes seal(const std::array<uint8_t, 32>& recipient_box_pk, std::span<const uint8_t> msg) {
    ensure_sodium();
    Bytes out(msg.size() + crypto_box_SEALBYTES);
    crypto_box_seal(out.data(), msg.data(), msg.size(), recipient_box_pk.data());
    return out;
}

std::optional<Bytes> seal_open(const BoxKeys& keys, std::span<const uint8_t> ciphertext) {
    ensure_sodium();
    if (ciphertext.size() < crypto_box_SEALBYTES) return std::nullopt;
    Bytes out(ciphertext.size() - crypto_box_SEALBYTES);
    if (crypto_box_seal_open(out.data(), ciphertext.data(), ciphertext.size(), keys.pk.data(),
                             keys.sk.data()) != 0)
        return std::nullopt;
    return out;
}

std::array<uint8_t, 64> sign_detached(const SignKeys& keys, std::span<const uint8_t> msg) {
    ensure_sodium();
    std::array<uint8_t, 64> sig;
    crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), keys.sk.data());
    return sig;
}

bool verify_detached(const std::array<uint8_t, 32>& pk, std::span<const uint8_t> msg,
                     const std::array<uint8_t, 64>& sig) {
    ensure_sodium();
    return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), pk.data()) == 0;
}

// ---- commitments ----------------------------------------------------------------

Commitment commit_bytes(std::span<const uint8_t> encoded, const Nonce& nonce) {
    return {Hasher(Tag::ValueCommit).bytes(encoded).bytes(nonce).finish()};
}

bool verify_commitment(const Commitment& c, std::span<const uint8_t> encoded, const Nonce& nonce) {
    return commit_bytes(encoded, nonce) == c;
}

StateCommitment commit_state(std::vector<std::pair<std::string, Digest>> slot_digests) {
    std::sort(slot_digests.begin(), slot_digests.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Hasher h(Tag::StateCommit);
    for (const auto& [name, digest] : slot_digests) {
        h.u32be(static_cast<uint32_t>(name.size()));
        h.str(name);
        h.bytes(digest.v);
    }
    return {h.finish(), std::move(slot_digests)};
}

// ---- attestation fixture -----------------------------------------------------------

Digest runtime_teemr() { return Hasher(Tag::Teemr).str(kRuntimeVersion).finish(); }

Digest report_data_binding(const std::array<uint8_t, 32>& ver_key,
                           const std::array<uint8_t, 32>& enc_key) {
    return Hasher(Tag::ReportData).bytes(ver_key).bytes(enc_key).finish();
}

const SignKeys& ias_root_keys() {
    static const SignKeys keys = [] {
        ensure_sodium();
        SignKeys k;
        auto seed = derive_seed("cloak-ias-root-fixture");
        crypto_sign_seed_keypair(k.pk.data(), k.sk.data(), seed.data());
        return k;
    }();
    return keys;
}

namespace {

Digest ias_message(const Digest& mrenclave, const Digest& report_data, std::string_view status) {
    return Hasher(Tag::IasMessage).bytes(mrenclave.v).bytes(report_data.v).str(status).finish();
}

}  // namespace

std::array<uint8_t, 64> ias_sign(const Digest& mrenclave, const Digest& report_data,
                                 std::string_view quote_status) {
    return sign_detached(ias_root_keys(), ias_message(mrenclave, report_data, quote_status).v);
}

bool ias_verify(const IasReport& r) {
    return verify_detached(ias_root_keys().pk, ias_message(r.mrenclave, r.report_data, r.quote_status).v,
                           r.signature);
}

std::string IasReport::to_json_string() const {
    nlohmann::json body = {{"REPORTBODY",
                            {{"MRENCLAVE", mrenclave.hex()}, {"REPORTDATA", report_data.hex()}}}};
    nlohmann::json j = {
        {"X-IASReport-Signature", hex_encode(signature)},
        {"reportData",
         {{"isvEnclaveQuoteStatus", quote_status}, {"isvEnclaveQuoteBody", body}}},
    };
    return j.dump();
}

std::optional<IasReport> IasReport::from_json_string(const std::string& s) {
    nlohmann::json j = nlohmann::json::parse(s, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    try {
        IasReport r;
        auto sig = hex_decode(j.at("X-IASReport-Signature").get<std::string>());
        if (!sig || sig->size() != 64) return std::nullopt;
        std::copy(sig->begin(), sig->end(), r.signature.begin());
        const auto& rd = j.at("reportData");
        r.quote_status = rd.at("isvEnclaveQuoteStatus").get<std::string>();
        const auto& body = rd.at("isvEnclaveQuoteBody").at("REPORTBODY");
        auto mr = Digest::from_hex(body.at("MRENCLAVE").get<std::string>());
        auto rdata = Digest::from_hex(body.at("REPORTDATA").get<std::string>());
        if (!mr || !rdata) return std::nullopt;
        r.mrenclave = *mr;
        r.report_data = *rdata;
        return r;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

std::string RegisterData::to_json_string() const {
    nlohmann::json j;
    j["verKey"] = hex_encode(ver_key);
    j["encKey"] = hex_encode(enc_key);
    nlohmann::json mrs = nlohmann::json::array();
    for (const auto& t : teemrs) mrs.push_back(t.hex());
    j["TEEMRs"] = mrs;
    j["IASReport"] = report.to_json_string();
    return j.dump();
}

std::optional<RegisterData> RegisterData::from_json_string(const std::string& s) {
    nlohmann::json j = nlohmann::json::parse(s, nullptr, false);
    if (j.is_discarded()) return std::nullopt;
    try {
        RegisterData d;
        auto vk = hex_decode(j.at("verKey").get<std::string>());
        auto ek = hex_decode(j.at("encKey").get<std::string>());
        if (!vk || vk->size() != 32 || !ek || ek->size() != 32) return std::nullopt;
        std::copy(vk->begin(), vk->end(), d.ver_key.begin());
        std::copy(ek->begin(), ek->end(), d.enc_key.begin());
        for (const auto& t : j.at("TEEMRs")) {
            auto mr = Digest::from_hex(t.get<std::string>());
            if (!mr) return std::nullopt;
            d.teemrs.push_back(*mr);
        }
        auto rep = IasReport::from_json_string(j.at("IASReport").get<std::string>());
        if (!rep) return std::nullopt;
        d.report = *rep;
        return d;
    } catch (const nlohmann::json::exception&) {
        return std::nullopt;
    }
}

RegisterData mock_attest(const ExecutorKeys& keys) {
    RegisterData d;
    d.ver_key = keys.sign.pk;
    d.enc_key = keys.box.pk;
    d.teemrs = {keys.teemr};
    d.report.quote_status = "OK";
    d.report.mrenclave = keys.teemr;
    d.report.report_data = report_data_binding(keys.sign.pk, keys.box.pk);
    d.report.signature = ias_sign(d.report.mrenclave, d.report.report_data, d.report.quote_status);
    return d;
}

// ---- execution proofs ----------------------------------------------------------------

Digest proof_digest(const Digest& policy_hash, const Digest& code_hash, const Digest& old_root,
                    const std::vector<std::pair<Address, Digest>>& return_commitments,
                    const Digest& new_root) {
    Hasher h(Tag::Proof);
    h.bytes(policy_hash.v).bytes(code_hash.v).bytes(old_root.v);
    h.u32be(static_cast<uint32_t>(return_commitments.size()));
    for (const auto& [addr, digest] : return_commitments) {
        h.bytes(addr);
        h.bytes(digest.v);
    }
    h.bytes(new_root.v);
    return h.finish();
}

}  // namespace cloak::crypto
