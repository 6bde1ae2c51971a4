#pragma once

#include <string>
#include <vector>

namespace cloak {

enum class OwnerKind { All, Me, Tee, Party, PartyClass };

// One owner: the public domain, the caller, the enclave, a single named
// address variable, or every member of a party-class binding.
struct OwnerAtom {
    OwnerKind kind = OwnerKind::All;
    std::string name;  // Party / PartyClass

    static OwnerAtom all() { return {OwnerKind::All, {}}; }
    static OwnerAtom me() { return {OwnerKind::Me, {}}; }
    static OwnerAtom tee() { return {OwnerKind::Tee, {}}; }
    static OwnerAtom party(std::string n) { return {OwnerKind::Party, std::move(n)}; }
    static OwnerAtom party_class(std::string n) { return {OwnerKind::PartyClass, std::move(n)}; }

    // "all" | "me" | "tee" | "id:<name>" | "class:<name>"
    std::string to_string() const;

    friend bool operator==(const OwnerAtom& a, const OwnerAtom& b) {
        return a.kind == b.kind && a.name == b.name;
    }
    friend bool operator<(const OwnerAtom& a, const OwnerAtom& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.name < b.name;
    }
};

// Sorted small set with value semantics.
class OwnerSet {
public:
    OwnerSet() = default;
    OwnerSet(std::initializer_list<OwnerAtom> atoms);
    static OwnerSet single(OwnerAtom a);

    void insert(OwnerAtom a);
    void unite(const OwnerSet& other);
    bool contains(const OwnerAtom& a) const;
    bool contains_kind(OwnerKind k) const;
    size_t size() const { return atoms_.size(); }
    bool empty() const { return atoms_.empty(); }

    // Atoms other than `all`.
    size_t private_count() const;

    auto begin() const { return atoms_.begin(); }
    auto end() const { return atoms_.end(); }

    // "{all, class:p}"
    std::string to_string() const;

    friend bool operator==(const OwnerSet& a, const OwnerSet& b) { return a.atoms_ == b.atoms_; }

private:
    std::vector<OwnerAtom> atoms_;
};

}  // namespace cloak
