#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <sodium.h>

#include "cloak/crypto.hpp"
#include "cloak/value.hpp"

using namespace cloak;
using namespace cloak::crypto;

namespace {

// Vectors frozen from an independent hashlib implementation of the
// commitment and state-root constructions before this library existed.
constexpr const char* kEmptyStateRoot =
    "dbc1b4c900ffe48d575b5da5c638040125f65db0fe3e24494b76ea986457d986";
constexpr const char* kCommitUint0Zero =
    "ae0798d0ecaed2b778eddebf18f071a561c53658c05e76cedecc27cafbdbc577";
constexpr const char* kCommitEmptyMapZero =
    "61c3a516478dd4cd882644dea13a2cf1ab59f26d046ffc3dadf96d0ae5c347b1";
constexpr const char* kCommitUint5Nonce11 =
    "a094a68be2867773633069c755a1b2082f4a59211fae27cd4f5ac57a7b703db0";
constexpr const char* kCommitArr534Zero =
    "ecb0815bbb173b41f06f38bcdc86f03f0032abca65f6aa795a2a0fd9527bceea";
constexpr const char* kInitialSupplyChainRoot =
    "210fa8a379d5c7c68711098da7cbf5c076badd30568502f8f892bcc169d28e3b";

Nonce zero_nonce() { return Nonce{}; }

Nonce filled_nonce(uint8_t b) {
    Nonce n;
    n.fill(b);
    return n;
}

Value uint_val(uint64_t v) { return Value::of_uint(U256(v)); }

Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

}  // namespace

TEST_CASE("hex round trip") {
    Bytes data = {0x00, 0x01, 0xab, 0xff};
    std::string h = hex_encode(data);
    CHECK(h == "0001abff");
    auto back = hex_decode(h);
    REQUIRE(back.has_value());
    CHECK(*back == data);

    CHECK_FALSE(hex_decode("abc").has_value());   // odd length
    CHECK_FALSE(hex_decode("zz").has_value());    // bad digit
    CHECK(hex_decode("")->empty());
}

TEST_CASE("digest from_hex") {
    Digest d = sha256_tagged(Tag::ValueCommit, to_bytes("x"));
    auto back = Digest::from_hex(d.hex());
    REQUIRE(back.has_value());
    CHECK(*back == d);
    CHECK_FALSE(Digest::from_hex("1234").has_value());  // wrong length
}

TEST_CASE("domain tags separate hash uses") {
    Bytes data = to_bytes("same input");
    CHECK(sha256_tagged(Tag::ValueCommit, data) != sha256_tagged(Tag::StateCommit, data));
    CHECK(sha256_tagged(Tag::Policy, data) != sha256_tagged(Tag::Code, data));
}

TEST_CASE("incremental hasher equals one-shot") {
    Bytes all = to_bytes("hello world");
    Digest whole = sha256_tagged(Tag::Proof, all);
    Digest split = Hasher(Tag::Proof).str("hello").str(" ").str("world").finish();
    CHECK(whole == split);
}

TEST_CASE("hasher matches raw sha256 with tag prefix") {
    // Independent route: libsodium's plain SHA-256 over tag byte plus payload.
    Bytes payload = to_bytes("payload");
    Bytes tagged;
    tagged.push_back(0x05);
    tagged.insert(tagged.end(), payload.begin(), payload.end());
    std::array<uint8_t, 32> raw{};
    crypto_hash_sha256(raw.data(), tagged.data(), tagged.size());
    CHECK(hex_encode(raw) == sha256_tagged(Tag::Proof, payload).hex());
}

TEST_CASE("frozen commitment vectors") {
    CHECK(commit_bytes(encode_value(uint_val(0)), zero_nonce()).digest.hex() == kCommitUint0Zero);
    CHECK(commit_bytes(encode_value(Value::map()), zero_nonce()).digest.hex() ==
          kCommitEmptyMapZero);
    CHECK(commit_bytes(encode_value(uint_val(5)), filled_nonce(0x11)).digest.hex() ==
          kCommitUint5Nonce11);

    Value arr = Value::array({uint_val(5), uint_val(3), uint_val(4)});
    CHECK(commit_bytes(encode_value(arr), zero_nonce()).digest.hex() == kCommitArr534Zero);
}

TEST_CASE("frozen state roots") {
    CHECK(commit_state({}).root.hex() == kEmptyStateRoot);

    Digest balances = commit_bytes(encode_value(Value::map()), zero_nonce()).digest;
    Digest mprice = commit_bytes(encode_value(uint_val(0)), zero_nonce()).digest;
    StateCommitment sc = commit_state({{"mPrice", mprice}, {"balances", balances}});
    CHECK(sc.root.hex() == kInitialSupplyChainRoot);
    REQUIRE(sc.slots.size() == 2);
    CHECK(sc.slots[0].first == "balances");  // sorted by name
    CHECK(sc.slots[1].first == "mPrice");
}

TEST_CASE("state root insensitive to input order, sensitive to content") {
    Digest a = sha256_tagged(Tag::ValueCommit, to_bytes("a"));
    Digest b = sha256_tagged(Tag::ValueCommit, to_bytes("b"));
    Digest fwd = commit_state({{"x", a}, {"y", b}}).root;
    Digest rev = commit_state({{"y", b}, {"x", a}}).root;
    CHECK(fwd == rev);
    CHECK(commit_state({{"x", b}, {"y", b}}).root != fwd);
    CHECK(commit_state({{"x", a}, {"z", b}}).root != fwd);  // name participates
}

TEST_CASE("commitment verification requires exact opening") {
    Bytes enc = encode_value(uint_val(42));
    Nonce n = filled_nonce(0x7a);
    Commitment c = commit_bytes(enc, n);
    CHECK(verify_commitment(c, enc, n));
    CHECK_FALSE(verify_commitment(c, encode_value(uint_val(43)), n));
    CHECK_FALSE(verify_commitment(c, enc, filled_nonce(0x7b)));
}

TEST_CASE("canonical value encoding layout") {
    // uint: 32-byte big-endian
    Bytes five = encode_value(uint_val(5));
    REQUIRE(five.size() == 32);
    CHECK(five[31] == 5);
    CHECK(five[0] == 0);

    // bool: single byte
    CHECK(encode_value(Value::of_bool(true)) == Bytes{0x01});
    CHECK(encode_value(Value::of_bool(false)) == Bytes{0x00});

    // address: 20 raw bytes
    Address a{};
    a[0] = 0xaa;
    a[19] = 0xbb;
    Bytes ea = encode_value(Value::of_address(a));
    REQUIRE(ea.size() == 20);
    CHECK(ea[0] == 0xaa);
    CHECK(ea[19] == 0xbb);

    // array: u32-be count then elements
    Bytes arr = encode_value(Value::array({uint_val(5), uint_val(3), uint_val(4)}));
    REQUIRE(arr.size() == 4 + 3 * 32);
    CHECK(arr[3] == 3);
    CHECK(arr[4 + 31] == 5);
    CHECK(arr[4 + 63] == 3);
    CHECK(arr[4 + 95] == 4);
}

TEST_CASE("mapping encoding is key-sorted regardless of insertion order") {
    TypeName vt;
    vt.kind = TypeKind::Uint;

    Value m1 = Value::map();
    m1.map_at_or_insert(uint_val(9), vt) = uint_val(90);
    m1.map_at_or_insert(uint_val(1), vt) = uint_val(10);

    Value m2 = Value::map();
    m2.map_at_or_insert(uint_val(1), vt) = uint_val(10);
    m2.map_at_or_insert(uint_val(9), vt) = uint_val(90);

    CHECK(encode_value(m1) == encode_value(m2));
    CHECK(m1 == m2);

    Bytes enc = encode_value(m1);
    REQUIRE(enc.size() == 4 + 2 * 64);
    CHECK(enc[3] == 2);
    CHECK(enc[4 + 31] == 1);  // key 1 first
}

TEST_CASE("record encoding is name-sorted") {
    Bytes fwd = encode_record({{"winner", uint_val(1)}, {"sPrice", uint_val(4)}});
    Bytes rev = encode_record({{"sPrice", uint_val(4)}, {"winner", uint_val(1)}});
    CHECK(fwd == rev);
    // u32 count + (u32 len + "sPrice" + 32) + (u32 len + "winner" + 32)
    REQUIRE(fwd.size() == 4 + (4 + 6 + 32) * 2);
    CHECK(fwd[3] == 2);
    CHECK(fwd[8] == 's');  // sPrice sorts before winner
}

TEST_CASE("u256 wraps modulo 2^256") {
    U256 max = ~U256(0);
    CHECK(U256(max + 1) == 0);
    CHECK(U256(U256(0) - 1) == max);
}

TEST_CASE("seeds and keys are deterministic") {
    auto s1 = derive_seed("party:alice");
    auto s2 = derive_seed("party:alice");
    auto s3 = derive_seed("party:bob");
    CHECK(s1 == s2);
    CHECK(s1 != s3);

    PartyKeys p1 = PartyKeys::from_seed(s1);
    PartyKeys p2 = PartyKeys::from_seed(s1);
    CHECK(p1.sign.pk == p2.sign.pk);
    CHECK(p1.box.pk == p2.box.pk);
    CHECK(p1.address == p2.address);
    CHECK(p1.address == address_from_verkey(p1.sign.pk));

    PartyKeys q = PartyKeys::from_seed(s3);
    CHECK(p1.address != q.address);
}

TEST_CASE("address derivation is the tagged digest prefix") {
    PartyKeys p = PartyKeys::from_seed(derive_seed("addr-check"));
    Digest d = Hasher(Tag::AddressDerive).bytes(p.sign.pk).finish();
    Address expect{};
    std::copy(d.v.begin(), d.v.begin() + 20, expect.begin());
    CHECK(p.address == expect);
}

TEST_CASE("sealed box round trip") {
    PartyKeys alice = PartyKeys::from_seed(derive_seed("seal:alice"));
    Bytes msg = to_bytes("{\"bid\":\"5\"}");

    Bytes ct = seal(alice.box.pk, msg);
    CHECK(ct.size() > msg.size());  // key + MAC overhead
    auto open = seal_open(alice.box, ct);
    REQUIRE(open.has_value());
    CHECK(*open == msg);

    // Tampering any byte breaks the authenticator.
    Bytes bad = ct;
    bad[bad.size() / 2] ^= 0xff;
    CHECK_FALSE(seal_open(alice.box, bad).has_value());

    // A different recipient cannot open it.
    PartyKeys bob = PartyKeys::from_seed(derive_seed("seal:bob"));
    CHECK_FALSE(seal_open(bob.box, ct).has_value());
}

TEST_CASE("detached signatures") {
    ExecutorKeys ex = ExecutorKeys::from_seed(derive_seed("sig:executor"));
    Bytes msg = to_bytes("announcement digest");
    auto sig = sign_detached(ex.sign, msg);
    CHECK(verify_detached(ex.sign.pk, msg, sig));

    auto bad_sig = sig;
    bad_sig[0] ^= 0x01;
    CHECK_FALSE(verify_detached(ex.sign.pk, msg, bad_sig));

    Bytes other = to_bytes("another message");
    CHECK_FALSE(verify_detached(ex.sign.pk, other, sig));

    ExecutorKeys ex2 = ExecutorKeys::from_seed(derive_seed("sig:other"));
    CHECK_FALSE(verify_detached(ex2.sign.pk, msg, sig));
}

TEST_CASE("attestation fixture") {
    ExecutorKeys ex = ExecutorKeys::from_seed(derive_seed("attest:e1"));
    CHECK(ex.teemr == runtime_teemr());
    CHECK(runtime_teemr() == runtime_teemr());  // stable measurement

    RegisterData rd = mock_attest(ex);
    CHECK(rd.ver_key == ex.sign.pk);
    CHECK(rd.enc_key == ex.box.pk);
    REQUIRE(!rd.teemrs.empty());
    CHECK(rd.teemrs.front() == runtime_teemr());
    CHECK(rd.report.quote_status == "OK");
    CHECK(rd.report.report_data == report_data_binding(rd.ver_key, rd.enc_key));
    CHECK(ias_verify(rd.report));

    // Any tampering of the signed fields must fail verification.
    IasReport bad = rd.report;
    bad.mrenclave.v[0] ^= 0xff;
    CHECK_FALSE(ias_verify(bad));

    bad = rd.report;
    bad.report_data.v[0] ^= 0xff;
    CHECK_FALSE(ias_verify(bad));

    bad = rd.report;
    bad.quote_status = "GROUP_OUT_OF_DATE";
    CHECK_FALSE(ias_verify(bad));

    bad = rd.report;
    bad.signature[3] ^= 0x10;
    CHECK_FALSE(ias_verify(bad));
}

TEST_CASE("register data json round trip") {
    ExecutorKeys ex = ExecutorKeys::from_seed(derive_seed("attest:json"));
    RegisterData rd = mock_attest(ex);
    auto back = RegisterData::from_json_string(rd.to_json_string());
    REQUIRE(back.has_value());
    CHECK(back->ver_key == rd.ver_key);
    CHECK(back->enc_key == rd.enc_key);
    CHECK(back->teemrs == rd.teemrs);
    CHECK(back->report.mrenclave == rd.report.mrenclave);
    CHECK(back->report.signature == rd.report.signature);
    CHECK(ias_verify(back->report));

    CHECK_FALSE(RegisterData::from_json_string("not json").has_value());
    CHECK_FALSE(RegisterData::from_json_string("{}").has_value());
}

TEST_CASE("proof digest binds every field and the commitment order") {
    Digest ph = sha256_tagged(Tag::Policy, to_bytes("p"));
    Digest ch = sha256_tagged(Tag::Code, to_bytes("c"));
    Digest oldr = sha256_tagged(Tag::StateCommit, to_bytes("o"));
    Digest newr = sha256_tagged(Tag::StateCommit, to_bytes("n"));

    Address a1{};
    a1[0] = 1;
    Address a2{};
    a2[0] = 2;
    Digest r1 = sha256_tagged(Tag::ValueCommit, to_bytes("r1"));
    Digest r2 = sha256_tagged(Tag::ValueCommit, to_bytes("r2"));

    Digest base = proof_digest(ph, ch, oldr, {{a1, r1}, {a2, r2}}, newr);
    CHECK(base == proof_digest(ph, ch, oldr, {{a1, r1}, {a2, r2}}, newr));
    CHECK(base != proof_digest(ch, ph, oldr, {{a1, r1}, {a2, r2}}, newr));
    CHECK(base != proof_digest(ph, ch, newr, {{a1, r1}, {a2, r2}}, oldr));
    CHECK(base != proof_digest(ph, ch, oldr, {{a2, r2}, {a1, r1}}, newr));
    CHECK(base != proof_digest(ph, ch, oldr, {{a1, r2}, {a2, r1}}, newr));
    CHECK(base != proof_digest(ph, ch, oldr, {{a1, r1}}, newr));
}

TEST_CASE("value json round trips") {
    TypeName uint_t;
    uint_t.kind = TypeKind::Uint;
    TypeName bool_t;
    bool_t.kind = TypeKind::Bool;
    TypeName addr_t;
    addr_t.kind = TypeKind::Address;

    auto u = value_from_json(value_to_json(uint_val(123)), uint_t);
    REQUIRE(u.has_value());
    CHECK(*u == uint_val(123));

    auto b = value_from_json(value_to_json(Value::of_bool(true)), bool_t);
    REQUIRE(b.has_value());
    CHECK(b->flag);

    Address a{};
    a[1] = 0xcd;
    auto av = value_from_json(value_to_json(Value::of_address(a)), addr_t);
    REQUIRE(av.has_value());
    CHECK(av->addr == a);

    // Type mismatches are rejected rather than coerced.
    CHECK_FALSE(value_from_json(nlohmann::json(true), uint_t).has_value());
    CHECK_FALSE(value_from_json(nlohmann::json("12"), addr_t).has_value());
    CHECK(value_matches_type(uint_val(1), uint_t));
    CHECK_FALSE(value_matches_type(uint_val(1), bool_t));
}

TEST_CASE("bare type notation parses back") {
    auto m = parse_bare_type("mapping(address=>uint)");
    REQUIRE(m.has_value());
    CHECK(m->kind == TypeKind::Mapping);
    REQUIRE(m->value != nullptr);
    CHECK(m->value->kind == TypeKind::Uint);

    auto arr = parse_bare_type("address[]");
    REQUIRE(arr.has_value());
    CHECK(arr->kind == TypeKind::Array);
    CHECK(arr->elem->kind == TypeKind::Address);

    auto fixed = parse_bare_type("uint[3]");
    REQUIRE(fixed.has_value());
    CHECK(fixed->kind == TypeKind::Array);
    CHECK_FALSE(fixed->dynamic);
    CHECK(fixed->fixed_size == 3);

    CHECK_FALSE(parse_bare_type("float").has_value());
}
