#include "cloak/policy.hpp"

#include <algorithm>
#include <set>

#include "cloak/pretty.hpp"

namespace cloak {

namespace {

std::string render_annotation(const OwnerAnnotation& a, const Resolution& res) {
    switch (a.kind) {
        case OwnerAnnKind::All: return "all";
        case OwnerAnnKind::Me: return "me";
        case OwnerAnnKind::Tee: return "tee";
        case OwnerAnnKind::Id: break;
    }
    auto it = res.ann_refs.find(&a);
    if (it == res.ann_refs.end()) return "all";
    switch (it->second.kind) {
        case AnnRefKind::AddressVar:
        case AnnRefKind::KeyBinding:
            return "id:" + a.name;
        case AnnRefKind::ClassBinding:
            return "class:" + a.name;
        case AnnRefKind::Unresolved:
            return "all";
    }
    return "all";
}

// Innermost value owner of a (possibly nested) mapping type.
const OwnerAnnotation* mapping_value_owner(const TypeName& t) {
    if (t.kind != TypeKind::Mapping) return nullptr;
    if (t.value_owner) return &*t.value_owner;
    return t.value ? mapping_value_owner(*t.value) : nullptr;
}

struct RwSets {
    std::vector<std::string> read;
    std::vector<std::string> mutate;
};

RwSets compute_rw_sets(const FunctionDecl& fn, const Resolution& res) {
    std::set<std::string> read, mutate;
    std::set<NodeId> write_only_roots;

    auto root_ident = [](const Expr& target) -> const Expr* {
        const Expr* node = &target;
        while (node->kind == ExprKind::Index)
            node = static_cast<const IndexExpr&>(*node).base.get();
        return node->kind == ExprKind::Ident ? node : nullptr;
    };
    auto state_name = [&](const Expr& ident) -> const std::string* {
        auto kind = res.ident_kind.find(ident.id);
        if (kind == res.ident_kind.end() || kind->second != DeclKind::State) return nullptr;
        const VarDecl* d = res.decl_of(ident);
        return d ? &d->name : nullptr;
    };

    for_each_expr(*fn.body, [&](const Expr& e) {
        const Expr* target = nullptr;
        bool writes_only = false;
        if (e.kind == ExprKind::Assign) {
            const auto& a = static_cast<const AssignExpr&>(e);
            target = a.target.get();
            writes_only = a.op == AssignOp::Assign && a.target->kind == ExprKind::Ident;
        } else if (e.kind == ExprKind::IncDec) {
            target = static_cast<const IncDecExpr&>(e).target.get();
        }
        if (!target) return;
        const Expr* root = root_ident(*target);
        if (!root) return;
        if (const std::string* n = state_name(*root)) {
            mutate.insert(*n);
            if (writes_only) write_only_roots.insert(root->id);
        }
    });
    for_each_expr(*fn.body, [&](const Expr& e) {
        if (e.kind != ExprKind::Ident || write_only_roots.count(e.id)) return;
        if (const std::string* n = state_name(e)) read.insert(*n);
    });

    return {{read.begin(), read.end()}, {mutate.begin(), mutate.end()}};
}

nlohmann::json var_to_json(const PolicyVar& v) {
    nlohmann::json j = {{"name", v.name}, {"owner", v.owner}, {"type", v.type}};
    if (!v.binds.empty()) j["binds"] = v.binds;
    return j;
}

PolicyVar var_from_json(const nlohmann::json& j) {
    return {j.at("name").get<std::string>(), j.at("owner").get<std::string>(),
            j.at("type").get<std::string>(), j.value("binds", std::string())};
}

}  // namespace

std::string policy_owner_string(const VarDecl& d, const Resolution& res) {
    if (d.owner) return render_annotation(*d.owner, res);
    if (const OwnerAnnotation* vo = mapping_value_owner(d.type)) return render_annotation(*vo, res);
    if (d.type.kind == TypeKind::Array && d.type.elem_owner)
        return render_annotation(*d.type.elem_owner, res);
    return "all";
}

namespace {

PolicyVar policy_var(const VarDecl& d, const Resolution& res) {
    PolicyVar v{d.name, policy_owner_string(d, res), bare_type(d.type), {}};
    if (d.type.kind == TypeKind::Array && d.type.class_binding) v.binds = *d.type.class_binding;
    return v;
}

}  // namespace

nlohmann::json PrivacyPolicy::to_json() const {
    nlohmann::json j;
    j["contract"] = contract;
    j["states"] = nlohmann::json::array();
    for (const auto& s : states) j["states"].push_back(var_to_json(s));
    j["functions"] = nlohmann::json::array();
    for (const auto& f : functions) {
        nlohmann::json fj;
        fj["name"] = f.name;
        fj["kind"] = f.kind;
        fj["inputs"] = nlohmann::json::array();
        for (const auto& v : f.inputs) fj["inputs"].push_back(var_to_json(v));
        fj["returns"] = nlohmann::json::array();
        for (const auto& v : f.returns) fj["returns"].push_back(var_to_json(v));
        fj["read"] = f.read;
        fj["mutate"] = f.mutate;
        j["functions"].push_back(std::move(fj));
    }
    return j;
}

std::string PrivacyPolicy::canonical_bytes() const { return to_json().dump(); }

PrivacyPolicy PrivacyPolicy::from_json(const nlohmann::json& j) {
    PrivacyPolicy p;
    p.contract = j.at("contract").get<std::string>();
    for (const auto& s : j.at("states")) p.states.push_back(var_from_json(s));
    for (const auto& fj : j.at("functions")) {
        PolicyFunction f;
        f.name = fj.at("name").get<std::string>();
        f.kind = fj.at("kind").get<std::string>();
        for (const auto& v : fj.at("inputs")) f.inputs.push_back(var_from_json(v));
        for (const auto& v : fj.at("returns")) f.returns.push_back(var_from_json(v));
        f.read = fj.at("read").get<std::vector<std::string>>();
        f.mutate = fj.at("mutate").get<std::vector<std::string>>();
        p.functions.push_back(std::move(f));
    }
    return p;
}

const PolicyFunction* PrivacyPolicy::function(const std::string& name) const {
    for (const auto& f : functions)
        if (f.name == name) return &f;
    return nullptr;
}

const PolicyVar* PrivacyPolicy::state(const std::string& name) const {
    for (const auto& s : states)
        if (s.name == name) return &s;
    return nullptr;
}

PrivacyPolicy generate_policy(const CheckedContract& cc) {
    PrivacyPolicy p;
    const ContractDecl& c = *cc.contract;
    const Resolution& res = cc.resolution;
    p.contract = c.name;
    for (const auto& s : c.state_vars) p.states.push_back(policy_var(s, res));
    for (const auto& fa : cc.functions) {
        const FunctionDecl& fn = *fa.fn;
        PolicyFunction f;
        f.name = fn.name;
        f.kind = function_kind_name(fa.kind);
        for (const auto& v : fn.params) f.inputs.push_back(policy_var(v, res));
        for (const auto& v : fn.returns) f.returns.push_back(policy_var(v, res));
        auto rw = compute_rw_sets(fn, res);
        f.read = std::move(rw.read);
        f.mutate = std::move(rw.mutate);
        p.functions.push_back(std::move(f));
    }
    return p;
}

}  // namespace cloak
