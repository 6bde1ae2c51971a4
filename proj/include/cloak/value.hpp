#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "cloak/ast.hpp"
#include "cloak/crypto.hpp"

namespace cloak {

// Unsigned 256-bit with wrapping arithmetic, matching contract semantics.
using U256 = boost::multiprecision::uint256_t;

U256 u256_from_decimal(const std::string& text);
std::string u256_to_decimal(const U256& v);

// Runtime value: scalar, array, or mapping. Mappings keep their entries
// sorted by the canonical encoding of the key, which fixes the encoding of
// the mapping itself.
class Value {
public:
    enum class Kind { Uint, Bool, Address, Array, Map };

    Kind kind = Kind::Uint;
    U256 num = 0;
    bool flag = false;
    crypto::Address addr{};
    std::vector<Value> elems;
    std::vector<std::pair<Value, Value>> entries;

    Value() = default;
    static Value of_uint(U256 v);
    static Value of_bool(bool b);
    static Value of_address(const crypto::Address& a);
    static Value array(std::vector<Value> elems);
    static Value map();

    bool is_scalar() const { return kind == Kind::Uint || kind == Kind::Bool || kind == Kind::Address; }

    // Mapping access by key. find returns null when absent; at_or_insert
    // default-constructs the slot from the mapped type.
    Value* map_find(const Value& key);
    const Value* map_find(const Value& key) const;
    Value& map_at_or_insert(const Value& key, const TypeName& value_type);

    friend bool operator==(const Value& a, const Value& b);
    friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

// Canonical byte encoding:
//   uint    32-byte big-endian
//   bool    1 byte
//   address 20 bytes
//   array   u32-be count, then elements in index order
//   mapping u32-be count, then enc(key) enc(value) pairs ordered by enc(key)
crypto::Bytes encode_value(const Value& v);

// Named-field record: u32-be count, then (u32-be name length, name, enc(value))
// sorted by name. Used for multi-value return payloads.
crypto::Bytes encode_record(const std::vector<std::pair<std::string, Value>>& fields);

Value default_value(const TypeName& t);
bool value_matches_type(const Value& v, const TypeName& t);

// JSON mapping used in payloads and scenario files: uint as decimal string,
// bool as bool, address as 40-char hex string, array as list, mapping as an
// object keyed by the key's JSON string form.
nlohmann::json value_to_json(const Value& v);
std::optional<Value> value_from_json(const nlohmann::json& j, const TypeName& t);

std::string value_display(const Value& v);

// Parses the policy type notation ("uint", "address[]", "uint[3]",
// "mapping(address=>uint)") back into a TypeName.
std::optional<TypeName> parse_bare_type(const std::string& text);

}  // namespace cloak
