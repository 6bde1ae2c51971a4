#include "cloak/value.hpp"

#include <algorithm>

namespace cloak {

U256 u256_from_decimal(const std::string& text) { return U256(text); }

std::string u256_to_decimal(const U256& v) { return v.str(); }

Value Value::of_uint(U256 v) {
    Value x;
    x.kind = Kind::Uint;
    x.num = std::move(v);
    return x;
}

Value Value::of_bool(bool b) {
    Value x;
    x.kind = Kind::Bool;
    x.flag = b;
    return x;
}

Value Value::of_address(const crypto::Address& a) {
    Value x;
    x.kind = Kind::Address;
    x.addr = a;
    return x;
}

Value Value::array(std::vector<Value> elems) {
    Value x;
    x.kind = Kind::Array;
    x.elems = std::move(elems);
    return x;
}

Value Value::map() {
    Value x;
    x.kind = Kind::Map;
    return x;
}

namespace {

void append_u32be(crypto::Bytes& out, uint32_t n) {
    out.push_back(static_cast<uint8_t>(n >> 24));
    out.push_back(static_cast<uint8_t>(n >> 16));
    out.push_back(static_cast<uint8_t>(n >> 8));
    out.push_back(static_cast<uint8_t>(n));
}

void encode_into(const Value& v, crypto::Bytes& out) {
    switch (v.kind) {
        case Value::Kind::Uint: {
            uint8_t buf[32] = {0};
            crypto::Bytes limbs;
            export_bits(v.num, std::back_inserter(limbs), 8);
            // export_bits emits only significant bytes, most significant first.
            size_t off = 32 - limbs.size();
            for (size_t i = 0; i < limbs.size(); ++i) buf[off + i] = limbs[i];
            if (v.num == 0) std::fill(std::begin(buf), std::end(buf), 0);
            out.insert(out.end(), std::begin(buf), std::end(buf));
            break;
        }
        case Value::Kind::Bool:
            out.push_back(v.flag ? 1 : 0);
            break;
        case Value::Kind::Address:
            out.insert(out.end(), v.addr.begin(), v.addr.end());
            break;
        case Value::Kind::Array:
            append_u32be(out, static_cast<uint32_t>(v.elems.size()));
            for (const Value& e : v.elems) encode_into(e, out);
            break;
        case Value::Kind::Map:
            append_u32be(out, static_cast<uint32_t>(v.entries.size()));
            for (const auto& [k, val] : v.entries) {
                encode_into(k, out);
                encode_into(val, out);
            }
            break;
    }
}

}  // namespace

crypto::Bytes encode_value(const Value& v) {
    crypto::Bytes out;
    encode_into(v, out);
    return out;
}

crypto::Bytes encode_record(const std::vector<std::pair<std::string, Value>>& fields) {
    std::vector<std::pair<std::string, const Value*>> sorted;
    sorted.reserve(fields.size());
    for (const auto& [name, value] : fields) sorted.emplace_back(name, &value);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    crypto::Bytes out;
    append_u32be(out, static_cast<uint32_t>(sorted.size()));
    for (const auto& [name, value] : sorted) {
        append_u32be(out, static_cast<uint32_t>(name.size()));
        out.insert(out.end(), name.begin(), name.end());
        encode_into(*value, out);
    }
    return out;
}

Value* Value::map_find(const Value& key) {
    crypto::Bytes k = encode_value(key);
    for (auto& [ek, ev] : entries)
        if (encode_value(ek) == k) return &ev;
    return nullptr;
}

const Value* Value::map_find(const Value& key) const {
    return const_cast<Value*>(this)->map_find(key);
}

Value& Value::map_at_or_insert(const Value& key, const TypeName& value_type) {
    crypto::Bytes k = encode_value(key);
    auto it = std::lower_bound(entries.begin(), entries.end(), k, [](const auto& e, const crypto::Bytes& kk) {
        return encode_value(e.first) < kk;
    });
    if (it != entries.end() && encode_value(it->first) == k) return it->second;
    it = entries.insert(it, {key, default_value(value_type)});
    return it->second;
}

bool operator==(const Value& a, const Value& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Value::Kind::Uint: return a.num == b.num;
        case Value::Kind::Bool: return a.flag == b.flag;
        case Value::Kind::Address: return a.addr == b.addr;
        case Value::Kind::Array: return a.elems == b.elems;
        case Value::Kind::Map: return a.entries == b.entries;
    }
    return false;
}

Value default_value(const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: return Value::of_uint(0);
        case TypeKind::Bool: return Value::of_bool(false);
        case TypeKind::Address: return Value::of_address({});
        case TypeKind::Mapping: return Value::map();
        case TypeKind::Array: {
            Value v = Value::array({});
            if (!t.dynamic)
                v.elems.assign(t.fixed_size, default_value(*t.elem));
            return v;
        }
    }
    return {};
}

bool value_matches_type(const Value& v, const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: return v.kind == Value::Kind::Uint;
        case TypeKind::Bool: return v.kind == Value::Kind::Bool;
        case TypeKind::Address: return v.kind == Value::Kind::Address;
        case TypeKind::Mapping:
            if (v.kind != Value::Kind::Map) return false;
            for (const auto& [k, val] : v.entries)
                if (!value_matches_type(k, *t.key) || !value_matches_type(val, *t.value)) return false;
            return true;
        case TypeKind::Array:
            if (v.kind != Value::Kind::Array) return false;
            if (!t.dynamic && v.elems.size() != t.fixed_size) return false;
            for (const auto& e : v.elems)
                if (!value_matches_type(e, *t.elem)) return false;
            return true;
    }
    return false;
}

nlohmann::json value_to_json(const Value& v) {
    switch (v.kind) {
        case Value::Kind::Uint: return u256_to_decimal(v.num);
        case Value::Kind::Bool: return v.flag;
        case Value::Kind::Address: return crypto::hex_encode(v.addr);
        case Value::Kind::Array: {
            nlohmann::json a = nlohmann::json::array();
            for (const auto& e : v.elems) a.push_back(value_to_json(e));
            return a;
        }
        case Value::Kind::Map: {
            nlohmann::json o = nlohmann::json::object();
            for (const auto& [k, val] : v.entries) {
                std::string key = k.kind == Value::Kind::Uint ? u256_to_decimal(k.num)
                                                              : crypto::hex_encode(k.addr);
                o[key] = value_to_json(val);
            }
            return o;
        }
    }
    return {};
}

std::optional<Value> value_from_json(const nlohmann::json& j, const TypeName& t) {
    switch (t.kind) {
        case TypeKind::Uint: {
            if (j.is_number_unsigned()) return Value::of_uint(U256(j.get<uint64_t>()));
            if (!j.is_string()) return std::nullopt;
            try {
                return Value::of_uint(u256_from_decimal(j.get<std::string>()));
            } catch (...) {
                return std::nullopt;
            }
        }
        case TypeKind::Bool:
            if (!j.is_boolean()) return std::nullopt;
            return Value::of_bool(j.get<bool>());
        case TypeKind::Address: {
            if (!j.is_string()) return std::nullopt;
            auto b = crypto::hex_decode(j.get<std::string>());
            if (!b || b->size() != 20) return std::nullopt;
            crypto::Address a;
            std::copy(b->begin(), b->end(), a.begin());
            return Value::of_address(a);
        }
        case TypeKind::Array: {
            if (!j.is_array()) return std::nullopt;
            Value v = Value::array({});
            for (const auto& e : j) {
                auto ev = value_from_json(e, *t.elem);
                if (!ev) return std::nullopt;
                v.elems.push_back(std::move(*ev));
            }
            if (!t.dynamic && v.elems.size() != t.fixed_size) return std::nullopt;
            return v;
        }
        case TypeKind::Mapping: {
            if (!j.is_object()) return std::nullopt;
            Value v = Value::map();
            for (const auto& [key, val] : j.items()) {
                auto kv = value_from_json(nlohmann::json(key), *t.key);
                if (!kv) return std::nullopt;
                auto vv = value_from_json(val, *t.value);
                if (!vv) return std::nullopt;
                v.map_at_or_insert(*kv, *t.value) = std::move(*vv);
            }
            return v;
        }
    }
    return std::nullopt;
}

std::string value_display(const Value& v) { return value_to_json(v).dump(); }

namespace {

std::optional<TypeName> parse_bare_type_view(std::string_view& s);

std::optional<TypeName> parse_base_type(std::string_view& s) {
    TypeName t;
    if (s.rfind("mapping(", 0) == 0) {
        s.remove_prefix(8);
        t.kind = TypeKind::Mapping;
        auto key = parse_base_type(s);
        if (!key || !key->is_scalar()) return std::nullopt;
        if (s.rfind("=>", 0) != 0) return std::nullopt;
        s.remove_prefix(2);
        auto value = parse_bare_type_view(s);
        if (!value) return std::nullopt;
        if (s.empty() || s.front() != ')') return std::nullopt;
        s.remove_prefix(1);
        t.key = std::make_unique<TypeName>(std::move(*key));
        t.value = std::make_unique<TypeName>(std::move(*value));
        return t;
    }
    if (s.rfind("uint", 0) == 0) {
        s.remove_prefix(4);
        t.kind = TypeKind::Uint;
        return t;
    }
    if (s.rfind("bool", 0) == 0) {
        s.remove_prefix(4);
        t.kind = TypeKind::Bool;
        return t;
    }
    if (s.rfind("address", 0) == 0) {
        s.remove_prefix(7);
        t.kind = TypeKind::Address;
        return t;
    }
    return std::nullopt;
}

std::optional<TypeName> parse_bare_type_view(std::string_view& s) {
    auto base = parse_base_type(s);
    if (!base) return std::nullopt;
    while (!s.empty() && s.front() == '[') {
        s.remove_prefix(1);
        TypeName arr;
        arr.kind = TypeKind::Array;
        arr.elem = std::make_unique<TypeName>(std::move(*base));
        if (!s.empty() && s.front() != ']') {
            uint64_t n = 0;
            size_t i = 0;
            while (i < s.size() && s[i] >= '0' && s[i] <= '9') {
                n = n * 10 + (s[i] - '0');
                ++i;
            }
            if (i == 0) return std::nullopt;
            s.remove_prefix(i);
            arr.dynamic = false;
            arr.fixed_size = n;
        }
        if (s.empty() || s.front() != ']') return std::nullopt;
        s.remove_prefix(1);
        base = std::move(arr);
    }
    return base;
}

}  // namespace

std::optional<TypeName> parse_bare_type(const std::string& text) {
    std::string_view s(text);
    auto t = parse_bare_type_view(s);
    if (!t || !s.empty()) return std::nullopt;
    return t;
}

}  // namespace cloak
