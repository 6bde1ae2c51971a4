#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "cloak/analysis.hpp"
#include "cloak/compiler.hpp"
#include "cloak/parser.hpp"

using namespace cloak;

namespace {

struct KindMix {
    int pub = 0;
    int priv = 0;
    int mpt = 0;
};

KindMix mix_of(const CompiledContract& c) {
    KindMix m;
    for (const auto& fn : c.functions) {
        switch (fn.kind) {
            case FunctionKind::Public: m.pub++; break;
            case FunctionKind::Private: m.priv++; break;
            case FunctionKind::Mpt: m.mpt++; break;
        }
    }
    return m;
}

CompileResult compile_corpus(const char* name) {
    return compile_file(std::string(CLOAK_REPO_DIR) + "/corpus/" + name + ".cloak");
}

std::string demo_text() {
    return read_text_file(std::string(CLOAK_REPO_DIR) + "/demo/supplychain.cloak").value();
}

CheckedContract check_text(const std::string& text, SourceFile& keep_alive) {
    keep_alive = parse_source("<test>", text);
    REQUIRE(keep_alive.diagnostics.empty());
    REQUIRE(keep_alive.contracts.size() == 1);
    return check_contract(*keep_alive.contracts[0]);
}

int count_code(const std::vector<Diagnostic>& ds, const char* code) {
    int n = 0;
    for (const auto& d : ds)
        if (d.code == code) n++;
    return n;
}

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

}  // namespace

TEST_CASE("corpus classifies to the planted function mixes") {
    struct Row {
        const char* name;
        int functions, pub, priv, mpt;
    };
    // (total, public, private, mpt) per bundled contract.
    const Row rows[] = {
        {"power_grid", 4, 1, 1, 2},   {"bidding", 4, 0, 2, 2},
        {"supply_chain", 6, 0, 5, 1}, {"scores", 6, 0, 2, 4},
        {"insurance", 8, 2, 3, 3},    {"erc20_token", 11, 4, 4, 3},
        {"yundou", 14, 10, 0, 4},     {"oracle", 22, 19, 0, 3},
        {"htlc", 39, 31, 0, 8},
    };
    for (const Row& r : rows) {
        CAPTURE(r.name);
        CompileResult res = compile_corpus(r.name);
        REQUIRE(res.ok());
        CHECK(res.diagnostics.empty());
        CHECK((int)res.compiled->functions.size() == r.functions);
        KindMix m = mix_of(*res.compiled);
        CHECK(m.pub == r.pub);
        CHECK(m.priv == r.priv);
        CHECK(m.mpt == r.mpt);
    }
}

TEST_CASE("reference contract owner inference") {
    SourceFile f;
    CheckedContract cc = check_text(demo_text(), f);
    CHECK(cc.diagnostics.empty());

    const FunctionAnalysis* fa = cc.function("biddingProcure");
    REQUIRE(fa != nullptr);
    CHECK(fa->kind == FunctionKind::Mpt);

    OwnerSet expect{OwnerAtom::all(), OwnerAtom::party("tenderer"), OwnerAtom::party("winner"),
                    OwnerAtom::party_class("p")};
    CHECK(fa->combined == expect);
    CHECK(fa->combined.to_string() == "{all, id:tenderer, id:winner, class:p}");
}

TEST_CASE("single planted defects yield single focused diagnostics") {
    std::string base = demo_text();
    SourceFile f;

    SUBCASE("unrevealed flow into a public local") {
        CheckedContract cc =
            check_text(replace_once(base, "uint mPrice = reveal(bids[0], all);",
                                    "uint mPrice = bids[0];"),
                       f);
        REQUIRE(cc.diagnostics.size() == 1);
        CHECK(cc.diagnostics[0].code == diag_code::implicit_flow);
        CHECK(cc.diagnostics[0].message ==
              "implicit flow of data owned by {class:p} into a location owned by {all}; use "
              "reveal to declassify");
    }

    SUBCASE("unrevealed flow into a differently-owned return") {
        CheckedContract cc =
            check_text(replace_once(base, "sPrice = reveal(bids[0], winner);",
                                    "sPrice = bids[0];"),
                       f);
        REQUIRE(cc.diagnostics.size() == 1);
        CHECK(cc.diagnostics[0].code == diag_code::implicit_flow);
        CHECK(cc.diagnostics[0].message.find("{class:p}") != std::string::npos);
        CHECK(cc.diagnostics[0].message.find("{id:winner}") != std::string::npos);
    }

    SUBCASE("missing owner on the revealed-to return") {
        CheckedContract cc =
            check_text(replace_once(base, "uint @winner sPrice", "uint sPrice"), f);
        REQUIRE(cc.diagnostics.size() == 1);
        CHECK(cc.diagnostics[0].code == diag_code::implicit_flow);
        CHECK(cc.diagnostics[0].message.find("{id:winner}") != std::string::npos);
        CHECK(cc.diagnostics[0].message.find("{all}") != std::string::npos);
    }

    SUBCASE("reveal target must name an address variable") {
        CheckedContract cc = check_text(
            replace_once(base, "reveal(bids[0], winner)", "reveal(bids[0], ghost)"), f);
        REQUIRE(count_code(cc.diagnostics, diag_code::unresolved_owner) == 1);
        CHECK(cc.diagnostics[0].message ==
              "reveal target 'ghost' does not name an address variable");
    }

    SUBCASE("me is meaningless on state") {
        CheckedContract cc =
            check_text(replace_once(base, "uint @all mPrice;", "uint @me mPrice;"), f);
        REQUIRE(cc.diagnostics.size() == 1);
        CHECK(cc.diagnostics[0].code == diag_code::unresolved_owner);
        CHECK(cc.diagnostics[0].message.find("state declarations") != std::string::npos);
    }
}

TEST_CASE("mapping parameters are rejected") {
    SourceFile f;
    CheckedContract cc = check_text(
        "contract C {\n"
        "  function f(mapping(address => uint) m) public returns (uint r) { r = 1; }\n"
        "}\n",
        f);
    REQUIRE(cc.diagnostics.size() == 1);
    CHECK(cc.diagnostics[0].code == diag_code::unsupported_construct);
    CHECK(cc.diagnostics[0].message == "mapping parameters are not supported");
}

TEST_CASE("owner annotations must resolve") {
    SourceFile f;
    CheckedContract cc = check_text(
        "contract C {\n"
        "  function f(uint @ghost x) public returns (uint r) { r = x; }\n"
        "}\n",
        f);
    REQUIRE(cc.diagnostics.size() == 1);
    CHECK(cc.diagnostics[0].code == diag_code::unresolved_owner);
    CHECK(cc.diagnostics[0].message ==
          "owner '@ghost' does not name an address variable, key binding, or party class");
}

TEST_CASE("reveal target must be assigned before use") {
    SourceFile f;
    CheckedContract cc = check_text(
        "contract C {\n"
        "  function f(address[!p] ps, uint[@p] bs) public returns (address w, uint @w s) {\n"
        "    s = reveal(bs[0], w);\n"
        "    w = ps[0];\n"
        "  }\n"
        "}\n",
        f);
    REQUIRE(count_code(cc.diagnostics, diag_code::unresolved_owner) == 1);
    CHECK(cc.diagnostics[0].message == "reveal target 'w' may be unassigned at this point");
}

TEST_CASE("equal flows are reported once, distinct flows separately") {
    SourceFile f;
    CheckedContract same = check_text(
        "contract C {\n"
        "  function f(uint @me x, uint @me y) public returns (uint r) {\n"
        "    r = x;\n"
        "    r = y;\n"
        "  }\n"
        "}\n",
        f);
    CHECK(count_code(same.diagnostics, diag_code::implicit_flow) == 1);

    SourceFile g;
    CheckedContract distinct = check_text(
        "contract C {\n"
        "  function f(address a, uint @me x, uint @a y) public returns (uint r) {\n"
        "    r = x;\n"
        "    r = y;\n"
        "  }\n"
        "}\n",
        g);
    CHECK(count_code(distinct.diagnostics, diag_code::implicit_flow) == 2);
}

TEST_CASE("compound assignment and inc/dec do not count as flows") {
    SourceFile f;
    CheckedContract cc = check_text(
        "contract C {\n"
        "  mapping(address !k => uint @k) pot;\n"
        "  function f(uint @me x) public returns (uint r) {\n"
        "    pot[msg.sender] += x;\n"
        "    pot[msg.sender]--;\n"
        "    r += x;\n"
        "    r++;\n"
        "  }\n"
        "}\n",
        f);
    CHECK(cc.diagnostics.empty());
}

TEST_CASE("classification by combined owner set") {
    OwnerSet just_all{OwnerAtom::all()};
    CHECK(classify_owner_set(just_all) == FunctionKind::Public);

    OwnerSet one_me{OwnerAtom::all(), OwnerAtom::me()};
    CHECK(classify_owner_set(one_me) == FunctionKind::Private);

    OwnerSet one_id{OwnerAtom::all(), OwnerAtom::party("a")};
    CHECK(classify_owner_set(one_id) == FunctionKind::Private);

    OwnerSet two_ids{OwnerAtom::party("a"), OwnerAtom::party("b")};
    CHECK(classify_owner_set(two_ids) == FunctionKind::Mpt);

    OwnerSet me_and_id{OwnerAtom::me(), OwnerAtom::party("a")};
    CHECK(classify_owner_set(me_and_id) == FunctionKind::Mpt);

    OwnerSet has_tee{OwnerAtom::all(), OwnerAtom::tee()};
    CHECK(classify_owner_set(has_tee) == FunctionKind::Mpt);

    OwnerSet has_class{OwnerAtom::party_class("p")};
    CHECK(classify_owner_set(has_class) == FunctionKind::Mpt);
}

TEST_CASE("classification through checked functions") {
    SourceFile f;
    CheckedContract cc = check_text(
        "contract C {\n"
        "  uint @tee seed;\n"
        "  mapping(address !k => uint @k) safe;\n"
        "  function viaTee() public returns (uint r) { r = reveal(seed, all); }\n"
        "  function viaIds(address u, address v, uint @u x, uint @v y) public\n"
        "      returns (uint @u r) { r = x + reveal(y, u); }\n"
        "  function viaMe(uint @me x) public returns (uint @me r) { r = x + safe[msg.sender]; }\n"
        "  function open(uint x) public returns (uint r) { r = x; }\n"
        "}\n",
        f);
    CHECK(cc.diagnostics.empty());
    CHECK(cc.function("viaTee")->kind == FunctionKind::Mpt);
    CHECK(cc.function("viaIds")->kind == FunctionKind::Mpt);
    CHECK(cc.function("viaMe")->kind == FunctionKind::Private);
    CHECK(cc.function("open")->kind == FunctionKind::Public);
}

namespace {

struct GenExpr {
    std::string text;
    OwnerSet owners;
};

// Random arithmetic tree over uint leaves with known owners.
GenExpr gen_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> leaf_pick(0, 5);
    std::uniform_int_distribution<int> node_pick(0, 9);
    int choice = depth <= 0 ? leaf_pick(rng) : node_pick(rng);
    switch (choice) {
        case 0: return {std::to_string(rng() % 1000), OwnerSet{OwnerAtom::all()}};
        case 1: return {"x0", OwnerSet{OwnerAtom::all()}};
        case 2: return {"x1", OwnerSet{OwnerAtom::me()}};
        case 3: return {"x2", OwnerSet{OwnerAtom::party("pa")}};
        case 4: return {"x3", OwnerSet{OwnerAtom::party("pb")}};
        case 5: {
            GenExpr inner = gen_expr(rng, depth - 1);
            return {"(-" + inner.text + ")", inner.owners};
        }
        default: {
            GenExpr lhs = gen_expr(rng, depth - 1);
            GenExpr rhs = gen_expr(rng, depth - 1);
            const char* ops[] = {"+", "-", "*", "/", "%"};
            std::string text = "(" + lhs.text + " " + ops[rng() % 5] + " " + rhs.text + ")";
            OwnerSet combined = lhs.owners;
            combined.unite(rhs.owners);
            return {text, combined};
        }
    }
}

}  // namespace

// Builds random arithmetic expressions over leaves with known owners and
// compares the inferred owner set of the root against a brute-force union
// of the leaf owners, which is what the inference rules must reduce to.
TEST_CASE("inferred expression owners equal the leaf-owner union") {
    std::mt19937_64 rng(20260817);
    int mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
        GenExpr e = gen_expr(rng, 6);
        std::string text =
            "contract C {\n"
            "  function f(address pa, address pb, uint x0, uint @me x1,\n"
            "             uint @pa x2, uint @pb x3) public {\n"
            "    uint r = " + e.text + ";\n"
            "  }\n"
            "}\n";
        SourceFile f = parse_source("<gen>", text);
        REQUIRE(f.diagnostics.empty());
        CheckedContract cc = check_contract(*f.contracts[0]);
        // Implicit-flow diagnostics are expected when private data lands in
        // the public local; inference itself must still be recorded.
        const FunctionAnalysis* fa = cc.function("f");
        REQUIRE(fa != nullptr);
        const auto& stmts = fa->fn->body->statements;
        REQUIRE(stmts.size() == 1);
        const auto& decl = static_cast<const VarDeclStmt&>(*stmts[0]);
        REQUIRE(decl.init != nullptr);
        auto it = fa->owner_of.find(decl.init->id);
        REQUIRE(it != fa->owner_of.end());
        if (!(it->second == e.owners)) {
            ++mismatches;
            CAPTURE(e.text);
            CHECK(it->second.to_string() == e.owners.to_string());
        }
    }
    CHECK(mismatches == 0);
}
