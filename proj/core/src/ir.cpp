// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/ir.hpp"

#include <algorithm>
#include <unordered_set>

namespace laf {

namespace {

constexpr unsigned kMaxBitVecWidth = 64;

bool same_var(const Var& a, const Var& b) {
    if (a.valid() != b.valid()) {
        return false;
    }
    if (!a.valid()) {
        return true;
    }
    return a.id() == b.id() && a.name() == b.name() && a.sort() == b.sort();
}

bool same_vars(const std::vector<Var>& a, const std::vector<Var>& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), same_var);
}

}  // namespace

Sort Sort::bitvec(unsigned width) {
    if (width == 0 || width > kMaxBitVecWidth) {
        throw Error("bitvector width must be in [1, 64], got " + std::to_string(width));
    }
    Sort s(Kind::BitVec);
    s.width_ = width;
    return s;
}

Sort Sort::tuple(std::vector<Sort> elements) {
    if (elements.empty()) {
        throw Error("tuple sort needs at least one element");
    }
    Sort s(Kind::Tuple);
    s.elems_ = std::move(elements);
    return s;
}

std::size_t Sort::scalar_count() const {
    if (kind_ != Kind::Tuple) {
        return 1;
    }
    std::size_t n = 0;
    for (const auto& e : elems_) {
        n += e.scalar_count();
    }
    return n;
}

std::string Sort::str() const {
    switch (kind_) {
    case Kind::Bool: return "bool";
    case Kind::Int: return "int";
    case Kind::BitVec: return "(bv " + std::to_string(width_) + ")";
    case Kind::Tuple: {
        std::string out = "(tuple";
        for (const auto& e : elems_) {
            out += " " + e.str();
        }
        return out + ")";
    }
    }
    return "?";
}

bool operator==(const Sort& a, const Sort& b) {
    return a.kind_ == b.kind_ && a.width_ == b.width_ && a.elems_ == b.elems_;
}

TheoryOp TheoryOp::bv_const(unsigned width, Integer bits) {
    if (width == 0 || width > kMaxBitVecWidth) {
        throw Error("bitvector literal width out of range");
    }
    const Integer modulus = Integer(1) << width;
    bits %= modulus;
    if (bits < 0) {
        bits += modulus;
    }
    return TheoryOp{OpKind::BvConst, std::move(bits), width, 0};
}

int TheoryOp::arity() const {
    switch (kind) {
    case OpKind::BoolConst:
    case OpKind::IntConst:
    case OpKind::BvConst: return 0;
    case OpKind::Not:
    case OpKind::Neg:
    case OpKind::Get:
    case OpKind::Extract: return 1;
    case OpKind::Mk: return -1;
    default: return 2;
    }
}

std::string TheoryOp::name() const {
    switch (kind) {
    case OpKind::BoolConst: return value != 0 ? "true" : "false";
    case OpKind::IntConst: return value.str();
    case OpKind::BvConst: return "#bv" + std::to_string(a) + "." + value.str();
    case OpKind::And: return "and";
    case OpKind::Or: return "or";
    case OpKind::Not: return "not";
    case OpKind::Add: return "add";
    case OpKind::Sub: return "sub";
    case OpKind::Neg: return "neg";
    case OpKind::Mul: return "mul";
    case OpKind::Div: return "div";
    case OpKind::Lt: return "lt";
    case OpKind::Le: return "le";
    case OpKind::Eq: return "eq";
    case OpKind::Mk: return "mk";
    case OpKind::Get: return "get." + std::to_string(a);
    case OpKind::Extract: return "extract." + std::to_string(a) + "." + std::to_string(b);
    case OpKind::Concat: return "concat";
    }
    return "?";
}

Sort TheoryOp::result_sort(std::span<const Sort> args) const {
    const int n = arity();
    if (n >= 0 && static_cast<int>(args.size()) != n) {
        throw Error(name() + " expects " + std::to_string(n) + " argument(s), got " + std::to_string(args.size()));
    }
    auto expect = [&](std::size_t i, const Sort& s) {
        if (!(args[i] == s)) {
            throw Error(name() + ": argument " + std::to_string(i) + " has sort " + args[i].str() + ", expected " +
                        s.str());
        }
    };
    switch (kind) {
    case OpKind::BoolConst: return Sort::boolean();
    case OpKind::IntConst: return Sort::integer();
    case OpKind::BvConst: return Sort::bitvec(a);
    case OpKind::And:
    case OpKind::Or:
        expect(0, Sort::boolean());
        expect(1, Sort::boolean());
        return Sort::boolean();
    case OpKind::Not: expect(0, Sort::boolean()); return Sort::boolean();
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div:
        expect(0, Sort::integer());
        expect(1, Sort::integer());
        return Sort::integer();
    case OpKind::Neg: expect(0, Sort::integer()); return Sort::integer();
    case OpKind::Lt:
    case OpKind::Le:
        expect(0, Sort::integer());
        expect(1, Sort::integer());
        return Sort::boolean();
    case OpKind::Eq: expect(1, args[0]); return Sort::boolean();
    case OpKind::Mk:
        if (args.empty()) {
            throw Error("mk expects at least one argument");
        }
        return Sort::tuple(std::vector<Sort>(args.begin(), args.end()));
    case OpKind::Get:
        if (!args[0].is_tuple() || a >= args[0].elements().size()) {
            throw Error(name() + ": argument of sort " + args[0].str() + " has no component " + std::to_string(a));
        }
        return args[0].elements()[a];
    case OpKind::Extract:
        if (!args[0].is_bitvec() || b > a || a >= args[0].width()) {
            throw Error(name() + ": invalid extraction from " + args[0].str());
        }
        return Sort::bitvec(a - b + 1);
    case OpKind::Concat:
        if (!args[0].is_bitvec() || !args[1].is_bitvec()) {
            throw Error("concat expects bitvectors");
        }
        return Sort::bitvec(args[0].width() + args[1].width());
    }
    throw Error("unknown operator");
}

Context::Context() : defs_(std::make_shared<const std::vector<Def>>()) {}

Context::Context(std::vector<Def> defs) : defs_(std::make_shared<const std::vector<Def>>(std::move(defs))) {}

std::size_t Context::size() const { return defs_->size(); }

const Def& Context::operator[](std::size_t i) const { return (*defs_)[i]; }

std::span<const Def> Context::defs() const { return {defs_->data(), defs_->size()}; }

bool operator==(const Context& a, const Context& b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool operator==(const Def& a, const Def& b) {
    if (!same_var(a.bound, b.bound) || a.rhs.index() != b.rhs.index()) {
        return false;
    }
    return std::visit(
        [&](const auto& x) -> bool {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rhs);
            if constexpr (std::is_same_v<T, OpRhs>) {
                return x.op == y.op && same_vars(x.args, y.args);
            } else if constexpr (std::is_same_v<T, NondetRhs>) {
                return same_var(x.a, y.a) && same_var(x.b, y.b);
            } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                return same_var(x.cond, y.cond) && same_var(x.val, y.val);
            } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                return true;
            } else {
                return same_var(x.loopvar, y.loopvar) && x.body == y.body && same_var(x.exit, y.exit) &&
                       same_var(x.init, y.init);
            }
        },
        a.rhs);
}

std::vector<Var> operands(const Def& def) {
    return std::visit(
        [](const auto& r) -> std::vector<Var> {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, OpRhs>) {
                return r.args;
            } else if constexpr (std::is_same_v<T, NondetRhs>) {
                return {r.a, r.b};
            } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                return {r.cond, r.val};
            } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                return {};
            } else {
                return {r.init};
            }
        },
        def.rhs);
}

void for_each_binder(const Context& ctx, const std::function<void(const Var&)>& fn) {
    for (const auto& d : ctx) {
        if (const auto* mu = std::get_if<MuRhs>(&d.rhs)) {
            fn(mu->loopvar);
            for_each_binder(mu->body, fn);
        }
        fn(d.bound);
    }
}

std::size_t count_defs(const Context& ctx) {
    std::size_t n = 0;
    for (const auto& d : ctx) {
        ++n;
        if (const auto* mu = std::get_if<MuRhs>(&d.rhs)) {
            n += count_defs(mu->body);
        }
    }
    return n;
}

VarId Term::var_count() const {
    VarId n = result.valid() ? result.id() + 1 : 0;
    for_each_binder(ctx, [&](const Var& v) { n = std::max<VarId>(n, v.id() + 1); });
    return n;
}

bool operator==(const Term& a, const Term& b) { return a.ctx == b.ctx && same_var(a.result, b.result); }

Context append(const Context& ctx, Def def, std::span<const Var> outer) {
    std::unordered_set<VarId> scope;
    for (const auto& v : outer) {
        scope.insert(v.id());
    }
    for_each_binder(ctx, [&](const Var& v) { scope.insert(v.id()); });
    if (scope.contains(def.bound.id())) {
        throw Error("duplicate binder '" + def.bound.name() + "'");
    }
    // Only top-level binders of ctx are in scope for the new definition.
    std::unordered_set<VarId> visible;
    for (const auto& v : outer) {
        visible.insert(v.id());
    }
    for (const auto& d : ctx) {
        visible.insert(d.bound.id());
    }
    std::vector<Sort> arg_sorts;
    for (const auto& v : operands(def)) {
        if (!visible.contains(v.id())) {
            throw Error("variable '" + v.name() + "' is not in scope");
        }
        arg_sorts.push_back(v.sort());
    }
    std::visit(
        [&](const auto& r) {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, OpRhs>) {
                if (!(r.op.result_sort(arg_sorts) == def.bound.sort())) {
                    throw Error("sort mismatch for '" + def.bound.name() + "'");
                }
            } else if constexpr (std::is_same_v<T, NondetRhs>) {
                if (!(r.a.sort() == def.bound.sort()) || !(r.b.sort() == def.bound.sort())) {
                    throw Error("nondet arguments must share the binder's sort");
                }
            } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                if (!r.cond.sort().is_bool() || !(r.val.sort() == def.bound.sort())) {
                    throw Error("assume needs a boolean condition and a value of the binder's sort");
                }
            } else if constexpr (std::is_same_v<T, MuRhs>) {
                if (!(r.init.sort() == def.bound.sort()) || !(r.loopvar.sort() == def.bound.sort()) ||
                    !(r.exit.sort() == def.bound.sort())) {
                    throw Error("mu loop, exit and init variables must share the binder's sort");
                }
            }
        },
        def.rhs);
    std::vector<Def> defs(ctx.begin(), ctx.end());
    defs.push_back(std::move(def));
    return Context(std::move(defs));
}

Sort sort_of(const Term& term, const Var& v) {
    std::optional<Sort> found;
    for_each_binder(term.ctx, [&](const Var& b) {
        if (b.id() == v.id()) {
            found = b.sort();
        }
    });
    if (!found) {
        throw Error("unknown variable '" + (v.valid() ? v.name() : std::string("?")) + "'");
    }
    return *found;
}

std::optional<Var> find_var(const Term& term, const std::string& name) {
    std::optional<Var> found;
    for_each_binder(term.ctx, [&](const Var& b) {
        if (!found && b.name() == name) {
            found = b;
        }
    });
    return found;
}

Var VarPool::fresh(std::string name, Sort sort) {
    return Var(next_++, std::make_shared<const VarInfo>(VarInfo{std::move(name), std::move(sort)}));
}

Builder::Builder(std::shared_ptr<VarPool> pool) : pool_(std::move(pool)) {}

Builder::Builder(std::shared_ptr<VarPool> pool, const Builder* parent) : pool_(std::move(pool)), parent_(parent) {}

bool Builder::in_scope(const Var& v) const {
    for (const Builder* b = this; b != nullptr; b = b->parent_) {
        if (b->local_.contains(v.id())) {
            return true;
        }
    }
    return false;
}

void Builder::require(const Var& v) const {
    if (!v.valid() || !in_scope(v)) {
        throw Error("variable '" + (v.valid() ? v.name() : std::string("?")) + "' is not in scope");
    }
}

void Builder::bind(const Var& v) {
    if (in_scope(v)) {
        throw Error("duplicate binder '" + v.name() + "'");
    }
    local_.insert(v.id());
}

Var Builder::op(std::string name, TheoryOp op, std::vector<Var> args) {
    std::vector<Sort> sorts;
    sorts.reserve(args.size());
    for (const auto& a : args) {
        require(a);
        sorts.push_back(a.sort());
    }
    Sort s = op.result_sort(sorts);
    Var v = pool_->fresh(std::move(name), std::move(s));
    bind(v);
    defs_.push_back(Def{v, OpRhs{std::move(op), std::move(args)}});
    return v;
}

Var Builder::nondet(std::string name, Var a, Var b) {
    require(a);
    require(b);
    if (!(a.sort() == b.sort())) {
        throw Error("nondet arguments have different sorts");
    }
    Var v = pool_->fresh(std::move(name), a.sort());
    bind(v);
    defs_.push_back(Def{v, NondetRhs{a, b}});
    return v;
}

Var Builder::assume(std::string name, Var cond, Var val) {
    require(cond);
    require(val);
    if (!cond.sort().is_bool()) {
        throw Error("assume condition must be boolean");
    }
    Var v = pool_->fresh(std::move(name), val.sort());
    bind(v);
    defs_.push_back(Def{v, AssumeRhs{cond, val}});
    return v;
}

Var Builder::unknown(std::string name, Sort sort) {
    Var v = pool_->fresh(std::move(name), std::move(sort));
    bind(v);
    defs_.push_back(Def{v, UnknownRhs{}});
    return v;
}

Var Builder::mu(std::string name, std::string loop_name, Var init,
                const std::function<Var(Builder& body, Var loopvar)>& body_fn) {
    require(init);
    Builder body(pool_, this);
    Var loopvar = pool_->fresh(std::move(loop_name), init.sort());
    body.bind(loopvar);
    Var exit = body_fn(body, loopvar);
    body.require(exit);
    if (!(exit.sort() == init.sort())) {
        throw Error("mu exit sort differs from init sort");
    }
    Var v = pool_->fresh(std::move(name), init.sort());
    bind(v);
    defs_.push_back(Def{v, MuRhs{loopvar, body.context(), exit, init}});
    return v;
}

void Builder::push(Def def) {
    for (const auto& a : operands(def)) {
        require(a);
    }
    bind(def.bound);
    defs_.push_back(std::move(def));
}

Term Builder::term(Var result) const {
    require(result);
    return Term{context(), result};
}

}  // namespace laf
