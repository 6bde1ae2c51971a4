#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace cloak::crypto {

using Bytes = std::vector<uint8_t>;
using Nonce = std::array<uint8_t, 32>;
using Address = std::array<uint8_t, 20>;

std::string hex_encode(std::span<const uint8_t> data);
std::optional<Bytes> hex_decode(std::string_view hex);

struct Digest {
    std::array<uint8_t, 32> v{};

    std::string hex() const { return hex_encode(v); }
    static std::optional<Digest> from_hex(std::string_view hex);

    friend bool operator==(const Digest& a, const Digest& b) { return a.v == b.v; }
    friend bool operator!=(const Digest& a, const Digest& b) { return !(a == b); }
    friend bool operator<(const Digest& a, const Digest& b) { return a.v < b.v; }
};

// One-byte domain separators; every hash use gets its own prefix.
enum class Tag : uint8_t {
    ValueCommit = 0x01,
    StateCommit = 0x02,
    Policy = 0x03,
    Code = 0x04,
    Proof = 0x05,
    AddressDerive = 0x06,
    Teemr = 0x07,
    ReportData = 0x08,
    SessionId = 0x09,
    NonceDerive = 0x0A,
    IasMessage = 0x0B,
    SeedDerive = 0x0C,
};

// Incremental SHA-256 that starts with a domain tag byte.
class Hasher {
public:
    explicit Hasher(Tag tag);
    Hasher& bytes(std::span<const uint8_t> data);
    Hasher& str(std::string_view s);
    Hasher& byte(uint8_t b);
    Hasher& u32be(uint32_t n);
    Hasher& u64be(uint64_t n);
    Digest finish();

private:
    std::array<uint8_t, 128> state_;  // opaque crypto_hash_sha256_state storage
};

Digest sha256_tagged(Tag tag, std::span<const uint8_t> data);

// ---- keys -------------------------------------------------------------------

struct SignKeys {
    std::array<uint8_t, 32> pk{};
    std::array<uint8_t, 64> sk{};
};

struct BoxKeys {
    std::array<uint8_t, 32> pk{};
    std::array<uint8_t, 32> sk{};
};

Address address_from_verkey(const std::array<uint8_t, 32>& verkey);
std::array<uint8_t, 32> derive_seed(std::string_view label);

struct PartyKeys {
    SignKeys sign;
    BoxKeys box;
    Address address{};

    static PartyKeys from_seed(const std::array<uint8_t, 32>& seed);
};

struct ExecutorKeys {
    SignKeys sign;
    BoxKeys box;
    Address address{};
    Digest teemr;

    static ExecutorKeys from_seed(const std::array<uint8_t, 32>& seed);
};

// ---- authenticated public-key encryption -------------------------------------

Bytes seal(const std::array<uint8_t, 32>& recipient_box_pk, std::span<const uint8_t> msg);
std::optional<Bytes> seal_open(const BoxKeys& keys, std::span<const uint8_t> ciphertext);

std::array<uint8_t, 64> sign_detached(const SignKeys& keys, std::span<const uint8_t> msg);
bool verify_detached(const std::array<uint8_t, 32>& pk, std::span<const uint8_t> msg,
                     const std::array<uint8_t, 64>& sig);

// ---- commitments --------------------------------------------------------------

struct Commitment {
    Digest digest;

    friend bool operator==(const Commitment& a, const Commitment& b) { return a.digest == b.digest; }
};

Commitment commit_bytes(std::span<const uint8_t> encoded, const Nonce& nonce);
bool verify_commitment(const Commitment& c, std::span<const uint8_t> encoded, const Nonce& nonce);

// Root over (name, digest) pairs; pairs are sorted by name internally.
struct StateCommitment {
    Digest root;
    std::vector<std::pair<std::string, Digest>> slots;  // sorted by name
};

StateCommitment commit_state(std::vector<std::pair<std::string, Digest>> slot_digests);

// ---- attestation fixture -------------------------------------------------------

inline constexpr std::string_view kRuntimeVersion = "cloak-runtime/1.0";

Digest runtime_teemr();
Digest report_data_binding(const std::array<uint8_t, 32>& ver_key,
                           const std::array<uint8_t, 32>& enc_key);

struct IasReport {
    std::string quote_status;
    Digest mrenclave;
    Digest report_data;
    std::array<uint8_t, 64> signature{};

    std::string to_json_string() const;
    static std::optional<IasReport> from_json_string(const std::string& s);
};

struct RegisterData {
    std::array<uint8_t, 32> ver_key{};
    std::array<uint8_t, 32> enc_key{};
    std::vector<Digest> teemrs;
    IasReport report;

    std::string to_json_string() const;
    static std::optional<RegisterData> from_json_string(const std::string& s);
};

const SignKeys& ias_root_keys();
std::array<uint8_t, 64> ias_sign(const Digest& mrenclave, const Digest& report_data,
                                 std::string_view quote_status);
bool ias_verify(const IasReport& r);
RegisterData mock_attest(const ExecutorKeys& keys);

// ---- execution proofs ------------------------------------------------------------

// Digest over (policy, code, old root, per-party return commitments, new root).
// Return commitments must be sorted by party address.
Digest proof_digest(const Digest& policy_hash, const Digest& code_hash, const Digest& old_root,
                    const std::vector<std::pair<Address, Digest>>& return_commitments,
                    const Digest& new_root);

}  // namespace cloak::crypto
