#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cloak/diag.hpp"
#include "cloak/source.hpp"

namespace cloak {

using NodeId = uint32_t;

// Monotonic id source shared by the parser and by programmatic builders.
class NodeCounter {
public:
    NodeId next() { return next_++; }

private:
    NodeId next_ = 1;
};

// ---- annotations ----------------------------------------------------------

enum class OwnerAnnKind { All, Me, Tee, Id };

// `@all`, `@me`, `@tee`, `@name`; also used for reveal's second argument
// (where only all/tee/id are grammatical).
struct OwnerAnnotation {
    OwnerAnnKind kind = OwnerAnnKind::All;
    std::string name;  // Id only
    Span span;
};

// ---- types ----------------------------------------------------------------

enum class TypeKind { Uint, Bool, Address, Mapping, Array };

struct TypeName {
    TypeKind kind = TypeKind::Uint;
    Span span;

    // Mapping: key is uint or address; `!k` binds the key for value annotations.
    std::unique_ptr<TypeName> key;
    std::optional<std::string> key_binding;
    Span key_binding_span;
    std::unique_ptr<TypeName> value;
    std::optional<OwnerAnnotation> value_owner;

    // Array: `T[]`, `T[n]`, `T[!p]` (party-class binding), `T[@o]` (element owner).
    std::unique_ptr<TypeName> elem;
    bool dynamic = true;
    uint64_t fixed_size = 0;
    std::optional<std::string> class_binding;
    Span class_binding_span;
    std::optional<OwnerAnnotation> elem_owner;

    TypeName clone() const;
    bool is_scalar() const {
        return kind == TypeKind::Uint || kind == TypeKind::Bool || kind == TypeKind::Address;
    }
};

// ---- expressions ----------------------------------------------------------

enum class ExprKind { Literal, Ident, Index, MsgSender, Length, Unary, Binary, Assign, IncDec, Reveal };

struct Expr {
    ExprKind kind;
    NodeId id = 0;
    Span span;

    virtual ~Expr() = default;

protected:
    Expr(ExprKind k, NodeId i, Span s) : kind(k), id(i), span(s) {}
};

using ExprPtr = std::unique_ptr<Expr>;

struct LiteralExpr final : Expr {
    bool is_bool = false;
    bool bool_value = false;
    std::string uint_text;  // canonical decimal, no leading zeros

    LiteralExpr(NodeId i, Span s) : Expr(ExprKind::Literal, i, s) {}
};

struct IdentExpr final : Expr {
    std::string name;

    IdentExpr(NodeId i, Span s) : Expr(ExprKind::Ident, i, s) {}
};

struct IndexExpr final : Expr {
    ExprPtr base;
    ExprPtr index;

    IndexExpr(NodeId i, Span s) : Expr(ExprKind::Index, i, s) {}
};

struct MsgSenderExpr final : Expr {
    MsgSenderExpr(NodeId i, Span s) : Expr(ExprKind::MsgSender, i, s) {}
};

struct LengthExpr final : Expr {
    ExprPtr base;

    LengthExpr(NodeId i, Span s) : Expr(ExprKind::Length, i, s) {}
};

enum class UnaryOp { Not, Neg };

struct UnaryExpr final : Expr {
    UnaryOp op = UnaryOp::Not;
    ExprPtr operand;

    UnaryExpr(NodeId i, Span s) : Expr(ExprKind::Unary, i, s) {}
};

enum class BinaryOp { Add, Sub, Mul, Div, Mod, Lt, Gt, Le, Ge, Eq, Ne, And, Or };

struct BinaryExpr final : Expr {
    BinaryOp op = BinaryOp::Add;
    ExprPtr lhs;
    ExprPtr rhs;

    BinaryExpr(NodeId i, Span s) : Expr(ExprKind::Binary, i, s) {}
};

enum class AssignOp { Assign, AddAssign, SubAssign };

struct AssignExpr final : Expr {
    AssignOp op = AssignOp::Assign;
    ExprPtr target;
    ExprPtr value;

    AssignExpr(NodeId i, Span s) : Expr(ExprKind::Assign, i, s) {}
};

struct IncDecExpr final : Expr {
    bool increment = true;  // postfix only
    ExprPtr target;

    IncDecExpr(NodeId i, Span s) : Expr(ExprKind::IncDec, i, s) {}
};

struct RevealExpr final : Expr {
    ExprPtr value;
    OwnerAnnotation target;  // all / tee / identifier

    RevealExpr(NodeId i, Span s) : Expr(ExprKind::Reveal, i, s) {}
};

// ---- declarations and statements ------------------------------------------

// One named slot: state variable, parameter, return binding, or local.
struct VarDecl {
    NodeId id = 0;
    Span span;
    TypeName type;
    std::optional<OwnerAnnotation> owner;  // scalar position `uint @all x`
    std::string name;
    Span name_span;
};

enum class StmtKind { Block, VarDecl, Expr, If, For, Return };

struct Stmt {
    StmtKind kind;
    NodeId id = 0;
    Span span;

    virtual ~Stmt() = default;

protected:
    Stmt(StmtKind k, NodeId i, Span s) : kind(k), id(i), span(s) {}
};

using StmtPtr = std::unique_ptr<Stmt>;

struct BlockStmt final : Stmt {
    std::vector<StmtPtr> statements;

    BlockStmt(NodeId i, Span s) : Stmt(StmtKind::Block, i, s) {}
};

struct VarDeclStmt final : Stmt {
    VarDecl decl;
    ExprPtr init;  // may be null

    VarDeclStmt(NodeId i, Span s) : Stmt(StmtKind::VarDecl, i, s) {}
};

struct ExprStmt final : Stmt {
    ExprPtr expr;

    ExprStmt(NodeId i, Span s) : Stmt(StmtKind::Expr, i, s) {}
};

struct IfStmt final : Stmt {
    ExprPtr cond;
    StmtPtr then_branch;
    StmtPtr else_branch;  // may be null

    IfStmt(NodeId i, Span s) : Stmt(StmtKind::If, i, s) {}
};

struct ForStmt final : Stmt {
    StmtPtr init;    // VarDeclStmt or ExprStmt, may be null
    ExprPtr cond;    // may be null
    ExprPtr update;  // may be null
    StmtPtr body;

    ForStmt(NodeId i, Span s) : Stmt(StmtKind::For, i, s) {}
};

struct ReturnStmt final : Stmt {
    std::vector<ExprPtr> values;  // empty for bare `return;`

    ReturnStmt(NodeId i, Span s) : Stmt(StmtKind::Return, i, s) {}
};

enum class Visibility { Public, Internal };

struct FunctionDecl {
    NodeId id = 0;
    Span span;
    std::string name;
    Span name_span;
    std::vector<VarDecl> params;
    std::vector<VarDecl> returns;  // named
    Visibility visibility = Visibility::Public;
    std::unique_ptr<BlockStmt> body;
};

struct ContractDecl {
    NodeId id = 0;
    Span span;
    std::string name;
    Span name_span;
    std::vector<VarDecl> state_vars;
    std::vector<std::unique_ptr<FunctionDecl>> functions;
};

struct SourceFile {
    SourceBuffer buffer;
    std::optional<std::string> pragma_text;  // version expression, e.g. "0.5.17"
    std::vector<std::unique_ptr<ContractDecl>> contracts;
    std::vector<Diagnostic> diagnostics;
};

// ---- helpers ---------------------------------------------------------------

ExprPtr clone_expr(const Expr& e, NodeCounter& ids);
StmtPtr clone_stmt(const Stmt& s, NodeCounter& ids);
VarDecl clone_decl(const VarDecl& d, NodeCounter& ids);

// Structural S-expression dump, spans and ids excluded. Two trees are
// structurally equal iff their dumps match byte for byte.
std::string dump_expr(const Expr& e);
std::string dump_stmt(const Stmt& s);
std::string dump_contract(const ContractDecl& c);
std::string dump_source_file(const SourceFile& f);

// Depth-first, parents after children (post-order).
void for_each_expr(const Expr& e, const std::function<void(const Expr&)>& fn);
void for_each_expr(const Stmt& s, const std::function<void(const Expr&)>& fn);
void for_each_stmt(const Stmt& s, const std::function<void(const Stmt&)>& fn);

}  // namespace cloak
