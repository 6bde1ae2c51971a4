#include "cloak/interpreter.hpp"

#include <unordered_map>

namespace cloak {

namespace {

constexpr uint64_t kStepLimit = 50'000'000;

struct ReturnSignal {};

class Interp {
public:
    Interp(const FunctionDecl& fn, const Resolution& res, const std::map<std::string, Value>& args,
           std::map<std::string, Value> state, const crypto::Address& sender)
        : fn_(fn), res_(res), sender_(sender) {
        state_ = std::move(state);
        for (const auto& p : fn.params) {
            auto it = args.find(p.name);
            if (it == args.end())
                throw RuntimeError{"missing argument '" + p.name + "'", p.span};
            if (!value_matches_type(it->second, p.type))
                throw RuntimeError{"argument '" + p.name + "' has the wrong type", p.span};
            env_[&p] = it->second;
        }
        for (const auto& r : fn.returns) env_[&r] = default_value(r.type);
    }

    InterpretResult run() {
        try {
            exec(*fn_.body);
        } catch (const ReturnSignal&) {
        }
        InterpretResult out;
        for (const auto& r : fn_.returns) out.returns.emplace_back(r.name, env_.at(&r));
        out.state = std::move(state_);
        out.written = std::move(written_);
        for (const auto& s : fn_.body->statements)
            if (s->kind == StmtKind::VarDecl) {
                const VarDecl& d = static_cast<const VarDeclStmt&>(*s).decl;
                auto it = env_.find(&d);
                if (it != env_.end()) out.body_locals[d.name] = it->second;
            }
        return out;
    }

private:
    const FunctionDecl& fn_;
    const Resolution& res_;
    crypto::Address sender_;
    std::map<std::string, Value> state_;
    std::unordered_map<const VarDecl*, Value> env_;
    std::set<std::string> written_;
    uint64_t steps_ = 0;

    void step(Span span) {
        if (++steps_ > kStepLimit) throw RuntimeError{"step limit exceeded", span};
    }

    // ---- statements -----------------------------------------------------------

    void exec(const Stmt& s) {
        step(s.span);
        switch (s.kind) {
            case StmtKind::Block:
                for (const auto& st : static_cast<const BlockStmt&>(s).statements) exec(*st);
                break;
            case StmtKind::VarDecl: {
                const auto& v = static_cast<const VarDeclStmt&>(s);
                env_[&v.decl] = v.init ? eval(*v.init) : default_value(v.decl.type);
                break;
            }
            case StmtKind::Expr:
                eval(*static_cast<const ExprStmt&>(s).expr);
                break;
            case StmtKind::If: {
                const auto& i = static_cast<const IfStmt&>(s);
                if (truthy(*i.cond))
                    exec(*i.then_branch);
                else if (i.else_branch)
                    exec(*i.else_branch);
                break;
            }
            case StmtKind::For: {
                const auto& f = static_cast<const ForStmt&>(s);
                if (f.init) exec(*f.init);
                while (!f.cond || truthy(*f.cond)) {
                    step(s.span);
                    exec(*f.body);
                    if (f.update) eval(*f.update);
                }
                break;
            }
            case StmtKind::Return: {
                const auto& r = static_cast<const ReturnStmt&>(s);
                for (size_t i = 0; i < r.values.size() && i < fn_.returns.size(); ++i)
                    env_[&fn_.returns[i]] = eval(*r.values[i]);
                throw ReturnSignal{};
            }
        }
    }

    bool truthy(const Expr& e) {
        Value v = eval(e);
        if (v.kind != Value::Kind::Bool) throw RuntimeError{"condition is not a bool", e.span};
        return v.flag;
    }

    // ---- lvalues ----------------------------------------------------------------

    Value& lval(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident: {
                const VarDecl* d = res_.decl_of(e);
                if (!d) throw RuntimeError{"unresolved identifier", e.span};
                auto kind = res_.ident_kind.find(e.id);
                if (kind != res_.ident_kind.end() && kind->second == DeclKind::State) {
                    auto it = state_.find(d->name);
                    if (it == state_.end())
                        it = state_.emplace(d->name, default_value(d->type)).first;
                    return it->second;
                }
                auto it = env_.find(d);
                if (it == env_.end()) it = env_.emplace(d, default_value(d->type)).first;
                return it->second;
            }
            case ExprKind::Index: {
                const auto& x = static_cast<const IndexExpr&>(e);
                Value& base = lval(*x.base);
                Value idx = eval(*x.index);
                SemType bt = res_.type_of(*x.base);
                if (base.kind == Value::Kind::Map) {
                    if (!bt.node) throw RuntimeError{"untyped mapping access", e.span};
                    return base.map_at_or_insert(idx, *bt.node->value);
                }
                if (base.kind == Value::Kind::Array) {
                    if (idx.kind != Value::Kind::Uint || idx.num >= base.elems.size())
                        throw RuntimeError{"array index out of bounds", x.index->span};
                    return base.elems[static_cast<size_t>(idx.num)];
                }
                throw RuntimeError{"value is not indexable", e.span};
            }
            default:
                throw RuntimeError{"expression is not assignable", e.span};
        }
    }

    // Root state slot of an assignment target, if any.
    void mark_written(const Expr& target) {
        const Expr* node = &target;
        while (node->kind == ExprKind::Index) node = static_cast<const IndexExpr&>(*node).base.get();
        if (node->kind != ExprKind::Ident) return;
        auto kind = res_.ident_kind.find(node->id);
        if (kind != res_.ident_kind.end() && kind->second == DeclKind::State)
            if (const VarDecl* d = res_.decl_of(*node)) written_.insert(d->name);
    }

    // ---- expressions ---------------------------------------------------------------

    Value eval(const Expr& e) {
        step(e.span);
        switch (e.kind) {
            case ExprKind::Literal: {
                const auto& l = static_cast<const LiteralExpr&>(e);
                if (l.is_bool) return Value::of_bool(l.bool_value);
                return Value::of_uint(u256_from_decimal(l.uint_text));
            }
            case ExprKind::Ident:
            case ExprKind::Index:
                return lval_read(e);
            case ExprKind::MsgSender:
                return Value::of_address(sender_);
            case ExprKind::Length: {
                const auto& x = static_cast<const LengthExpr&>(e);
                Value b = lval_read(*x.base);
                if (b.kind != Value::Kind::Array)
                    throw RuntimeError{"'.length' on a non-array value", e.span};
                return Value::of_uint(U256(b.elems.size()));
            }
            case ExprKind::Unary: {
                const auto& x = static_cast<const UnaryExpr&>(e);
                Value v = eval(*x.operand);
                if (x.op == UnaryOp::Not) {
                    if (v.kind != Value::Kind::Bool)
                        throw RuntimeError{"'!' on a non-bool value", e.span};
                    return Value::of_bool(!v.flag);
                }
                if (v.kind != Value::Kind::Uint)
                    throw RuntimeError{"unary '-' on a non-uint value", e.span};
                return Value::of_uint(U256(0) - v.num);
            }
            case ExprKind::Binary:
                return eval_binary(static_cast<const BinaryExpr&>(e));
            case ExprKind::Assign: {
                const auto& x = static_cast<const AssignExpr&>(e);
                Value rhs = eval(*x.value);
                Value& slot = lval(*x.target);
                switch (x.op) {
                    case AssignOp::Assign:
                        slot = rhs;
                        break;
                    case AssignOp::AddAssign:
                        require_uint(slot, rhs, e.span);
                        slot.num += rhs.num;
                        break;
                    case AssignOp::SubAssign:
                        require_uint(slot, rhs, e.span);
                        slot.num -= rhs.num;
                        break;
                }
                mark_written(*x.target);
                return slot;
            }
            case ExprKind::IncDec: {
                const auto& x = static_cast<const IncDecExpr&>(e);
                Value& slot = lval(*x.target);
                if (slot.kind != Value::Kind::Uint)
                    throw RuntimeError{"'++'/'--' on a non-uint value", e.span};
                Value old = slot;
                if (x.increment)
                    slot.num += 1;
                else
                    slot.num -= 1;
                mark_written(*x.target);
                return old;
            }
            case ExprKind::Reveal:
                return eval(*static_cast<const RevealExpr&>(e).value);
        }
        throw RuntimeError{"unsupported expression", e.span};
    }

    // Reads through the lvalue path without inserting absent mapping keys.
    Value lval_read(const Expr& e) {
        switch (e.kind) {
            case ExprKind::Ident: {
                const VarDecl* d = res_.decl_of(e);
                if (!d) throw RuntimeError{"unresolved identifier", e.span};
                auto kind = res_.ident_kind.find(e.id);
                if (kind != res_.ident_kind.end() && kind->second == DeclKind::State) {
                    auto it = state_.find(d->name);
                    return it == state_.end() ? default_value(d->type) : it->second;
                }
                auto it = env_.find(d);
                return it == env_.end() ? default_value(d->type) : it->second;
            }
            case ExprKind::Index: {
                const auto& x = static_cast<const IndexExpr&>(e);
                Value base = lval_read(*x.base);
                Value idx = eval(*x.index);
                SemType bt = res_.type_of(*x.base);
                if (base.kind == Value::Kind::Map) {
                    if (const Value* v = base.map_find(idx)) return *v;
                    if (!bt.node) throw RuntimeError{"untyped mapping access", e.span};
                    return default_value(*bt.node->value);
                }
                if (base.kind == Value::Kind::Array) {
                    if (idx.kind != Value::Kind::Uint || idx.num >= base.elems.size())
                        throw RuntimeError{"array index out of bounds", x.index->span};
                    return base.elems[static_cast<size_t>(idx.num)];
                }
                throw RuntimeError{"value is not indexable", e.span};
            }
            default:
                return eval(e);
        }
    }

    static void require_uint(const Value& a, const Value& b, Span span) {
        if (a.kind != Value::Kind::Uint || b.kind != Value::Kind::Uint)
            throw RuntimeError{"arithmetic on non-uint values", span};
    }

    Value eval_binary(const BinaryExpr& x) {
        if (x.op == BinaryOp::And) {
            Value l = eval(*x.lhs);
            if (l.kind != Value::Kind::Bool) throw RuntimeError{"'&&' on non-bool", x.lhs->span};
            if (!l.flag) return Value::of_bool(false);
            Value r = eval(*x.rhs);
            if (r.kind != Value::Kind::Bool) throw RuntimeError{"'&&' on non-bool", x.rhs->span};
            return r;
        }
        if (x.op == BinaryOp::Or) {
            Value l = eval(*x.lhs);
            if (l.kind != Value::Kind::Bool) throw RuntimeError{"'||' on non-bool", x.lhs->span};
            if (l.flag) return Value::of_bool(true);
            Value r = eval(*x.rhs);
            if (r.kind != Value::Kind::Bool) throw RuntimeError{"'||' on non-bool", x.rhs->span};
            return r;
        }
        Value l = eval(*x.lhs);
        Value r = eval(*x.rhs);
        switch (x.op) {
            case BinaryOp::Add:
                require_uint(l, r, x.span);
                return Value::of_uint(l.num + r.num);
            case BinaryOp::Sub:
                require_uint(l, r, x.span);
                return Value::of_uint(l.num - r.num);
            case BinaryOp::Mul:
                require_uint(l, r, x.span);
                return Value::of_uint(l.num * r.num);
            case BinaryOp::Div:
                require_uint(l, r, x.span);
                if (r.num == 0) throw RuntimeError{"division by zero", x.span};
                return Value::of_uint(l.num / r.num);
            case BinaryOp::Mod:
                require_uint(l, r, x.span);
                if (r.num == 0) throw RuntimeError{"modulo by zero", x.span};
                return Value::of_uint(l.num % r.num);
            case BinaryOp::Lt:
                require_uint(l, r, x.span);
                return Value::of_bool(l.num < r.num);
            case BinaryOp::Gt:
                require_uint(l, r, x.span);
                return Value::of_bool(l.num > r.num);
            case BinaryOp::Le:
                require_uint(l, r, x.span);
                return Value::of_bool(l.num <= r.num);
            case BinaryOp::Ge:
                require_uint(l, r, x.span);
                return Value::of_bool(l.num >= r.num);
            case BinaryOp::Eq:
                return Value::of_bool(l == r);
            case BinaryOp::Ne:
                return Value::of_bool(!(l == r));
            default:
                throw RuntimeError{"unsupported operator", x.span};
        }
    }
};

}  // namespace

InterpretResult interpret_function(const FunctionDecl& fn, const Resolution& res,
                                   const std::map<std::string, Value>& args,
                                   std::map<std::string, Value> state,
                                   const crypto::Address& sender) {
    Interp interp(fn, res, args, std::move(state), sender);
    return interp.run();
}

}  // namespace cloak
