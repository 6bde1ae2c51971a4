#include "cloak/compiler.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "cloak/parser.hpp"

namespace cloak {

nlohmann::json CompiledContract::summary_json() const {
    nlohmann::json j;
    j["contract"] = policy.contract;
    j["functions"] = nlohmann::json::array();
    for (const auto& f : functions)
        j["functions"].push_back({{"name", f.name},
                                  {"kind", function_kind_name(f.kind)},
                                  {"check_us", f.check_us},
                                  {"codegen_us", f.codegen_us}});
    j["hashes"] = {{"policy", policy_hash.hex()},
                   {"service", service_hash.hex()},
                   {"verifier", verifier_hash.hex()},
                   {"runtime", crypto::runtime_teemr().hex()}};
    return j;
}

CompileResult compile_source(std::string path, std::string text) {
    CompileResult out;
    out.file = parse_source(std::move(path), std::move(text));
    out.diagnostics = out.file.diagnostics;
    if (has_errors(out.diagnostics)) return out;

    if (out.file.contracts.size() != 1) {
        out.diagnostics.push_back({Severity::Error, diag_code::unsupported_construct,
                                   "expected exactly one contract per file, found " +
                                       std::to_string(out.file.contracts.size()),
                                   Span{0, 0}});
        return out;
    }

    const ContractDecl& c = *out.file.contracts.front();
    CompiledContract cc;
    cc.ast = &c;
    cc.checked = check_contract(c);
    for (const auto& d : cc.checked.diagnostics) out.diagnostics.push_back(d);
    if (!cc.checked.ok()) return out;

    cc.policy = generate_policy(cc.checked);
    cc.policy_bytes = cc.policy.canonical_bytes();
    cc.artifacts = generate_artifacts(cc.checked, cc.policy,
                                      out.file.pragma_text.value_or("0.5.17"));

    auto bytes_of = [](const std::string& s) {
        return std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    };
    cc.policy_hash = crypto::sha256_tagged(crypto::Tag::Policy, bytes_of(cc.policy_bytes));
    cc.service_hash = crypto::sha256_tagged(crypto::Tag::Code, bytes_of(cc.artifacts.service_source));
    cc.verifier_hash = crypto::sha256_tagged(crypto::Tag::Code, bytes_of(cc.artifacts.verifier_source));

    for (const auto& fa : cc.checked.functions) {
        auto us = cc.artifacts.codegen_us.find(fa.fn->name);
        cc.functions.push_back({fa.fn->name, fa.kind, fa.check_us,
                                us == cc.artifacts.codegen_us.end() ? 0 : us->second});
    }
    out.compiled = std::move(cc);
    return out;
}

CompileResult compile_file(const std::string& path) {
    auto text = read_text_file(path);
    if (!text) {
        CompileResult out;
        out.file.buffer = SourceBuffer(path, "");  // diagnostics render against this buffer
        out.diagnostics.push_back({Severity::Error, diag_code::parse,
                                   "cannot read file '" + path + "'", Span{0, 0}});
        return out;
    }
    return compile_source(path, std::move(*text));
}

std::optional<std::string> read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) return std::nullopt;
    return ss.str();
}

bool write_text_file_atomic(const std::string& path, const std::string& content) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out << content;
        if (!out.good()) return false;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        return false;
    }
    return true;
}

}  // namespace cloak
