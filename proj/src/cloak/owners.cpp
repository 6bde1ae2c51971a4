#include "cloak/owners.hpp"

#include <algorithm>

namespace cloak {

std::string OwnerAtom::to_string() const {
    switch (kind) {
        case OwnerKind::All: return "all";
        case OwnerKind::Me: return "me";
        case OwnerKind::Tee: return "tee";
        case OwnerKind::Party: return "id:" + name;
        case OwnerKind::PartyClass: return "class:" + name;
    }
    return "?";
}

OwnerSet::OwnerSet(std::initializer_list<OwnerAtom> atoms) {
    for (const auto& a : atoms) insert(a);
}

OwnerSet OwnerSet::single(OwnerAtom a) {
    OwnerSet s;
    s.insert(std::move(a));
    return s;
}

void OwnerSet::insert(OwnerAtom a) {
    auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a);
    if (it == atoms_.end() || !(*it == a)) atoms_.insert(it, std::move(a));
}

void OwnerSet::unite(const OwnerSet& other) {
    for (const auto& a : other.atoms_) insert(a);
}

bool OwnerSet::contains(const OwnerAtom& a) const {
    return std::binary_search(atoms_.begin(), atoms_.end(), a);
}

bool OwnerSet::contains_kind(OwnerKind k) const {
    return std::any_of(atoms_.begin(), atoms_.end(),
                       [k](const OwnerAtom& a) { return a.kind == k; });
}

size_t OwnerSet::private_count() const {
    size_t n = 0;
    for (const auto& a : atoms_)
        if (a.kind != OwnerKind::All) ++n;
    return n;
}

std::string OwnerSet::to_string() const {
    std::string out = "{";
    for (size_t i = 0; i < atoms_.size(); ++i) {
        if (i) out += ", ";
        out += atoms_[i].to_string();
    }
    out += '}';
    return out;
}

}  // namespace cloak
