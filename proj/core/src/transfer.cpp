// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>

#include "laf/lattice.hpp"

namespace laf {

namespace {

bool is_interval(const AbsValue& a) { return std::holds_alternative<Interval>(a.rep()); }

AbsValue empty_like(const AbsValue& a) {
    if (a.is_tuple()) {
        std::vector<AbsValue> out;
        for (const auto& e : a.elements()) {
            out.push_back(empty_like(e));
        }
        return out;
    }
    return std::visit(
        [](const auto& r) -> AbsValue {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return Interval::empty();
            } else if constexpr (std::is_same_v<T, Const>) {
                return Const::empty();
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return BoolSet::empty();
            } else if constexpr (std::is_same_v<T, BvSet>) {
                return BvSet::empty(r.width());
            } else {
                return AbsValue(std::vector<AbsValue>{});
            }
        },
        a.rep());
}

bool is_singleton(const AbsValue& a) {
    return std::visit(
        [](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return r.singleton().has_value();
            } else if constexpr (std::is_same_v<T, Const>) {
                return r.value().has_value();
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return r.bits() == 1 || r.bits() == 2;
            } else if constexpr (std::is_same_v<T, BvSet>) {
                return !r.is_top() && r.values().size() == 1;
            } else {
                return std::all_of(r.begin(), r.end(), is_singleton);
            }
        },
        a.rep());
}

Const const_arith(OpKind k, const Const& a, const Const& b) {
    if (a.is_empty() || b.is_empty()) {
        return Const::empty();
    }
    auto x = a.value();
    auto y = b.value();
    if (k == OpKind::Mul && ((x && *x == 0) || (y && *y == 0))) {
        return Const::of(0);
    }
    if (k == OpKind::Div && y && *y == 0) {
        return Const::empty();
    }
    if (!x || !y) {
        return Const::top();
    }
    switch (k) {
    case OpKind::Add: return Const::of(*x + *y);
    case OpKind::Sub: return Const::of(*x - *y);
    case OpKind::Mul: return Const::of(*x * *y);
    case OpKind::Div: return Const::of(tdiv(*x, *y));
    default: throw Error("not an arithmetic operator");
    }
}

AbsValue arith(OpKind k, const AbsValue& a, const AbsValue& b) {
    if (is_interval(a)) {
        const Interval& x = a.interval();
        const Interval& y = b.interval();
        switch (k) {
        case OpKind::Add: return add(x, y);
        case OpKind::Sub: return sub(x, y);
        case OpKind::Mul: return mul(x, y);
        case OpKind::Div: return div(x, y);
        default: throw Error("not an arithmetic operator");
        }
    }
    return const_arith(k, a.constant(), b.constant());
}

AbsValue negate(const AbsValue& a) {
    if (is_interval(a)) {
        return neg(a.interval());
    }
    const Const& c = a.constant();
    if (auto v = c.value()) {
        return Const::of(-*v);
    }
    return c;
}

BoolSet compare(OpKind k, const AbsValue& a, const AbsValue& b) {
    if (a.is_empty() || b.is_empty()) {
        return BoolSet::empty();
    }
    Interval x = Interval::top();
    Interval y = Interval::top();
    if (is_interval(a)) {
        x = a.interval();
        y = b.interval();
    } else {
        if (auto v = a.constant().value()) {
            x = Interval::point(*v);
        }
        if (auto v = b.constant().value()) {
            y = Interval::point(*v);
        }
    }
    const bool strict = k == OpKind::Lt;
    // Definitely true: x.hi < y.lo (lt) or x.hi <= y.lo (le).
    const bool surely = strict ? x.hi() < y.lo() : x.hi() <= y.lo();
    const bool never = strict ? y.hi() <= x.lo() : y.hi() < x.lo();
    if (surely) {
        return BoolSet::of(true);
    }
    if (never) {
        return BoolSet::of(false);
    }
    return BoolSet::top();
}

BoolSet equal(const AbsValue& a, const AbsValue& b) {
    if (a.is_empty() || b.is_empty()) {
        return BoolSet::empty();
    }
    if (meet(a, b).is_empty()) {
        return BoolSet::of(false);
    }
    if (is_singleton(a) && a == b) {
        return BoolSet::of(true);
    }
    return BoolSet::top();
}

template <class F>
BvSet map_bv(const BvSet& a, unsigned width, F&& f) {
    if (a.is_top()) {
        return BvSet::top(width);
    }
    std::set<Integer> out;
    for (const auto& v : a.values()) {
        out.insert(f(v));
    }
    return BvSet::of(width, std::move(out));
}

Integer extract_bits(const Integer& v, unsigned hi, unsigned lo) {
    return (v >> lo) & ((Integer(1) << (hi - lo + 1)) - 1);
}

}  // namespace

AbsValue transfer(const TheoryOp& op, std::span<const AbsValue> args, const LatticeConfig& cfg) {
    switch (op.kind) {
    case OpKind::BoolConst: return BoolSet::of(op.value != 0);
    case OpKind::IntConst:
        return cfg.int_mode == IntMode::Interval ? AbsValue(Interval::point(op.value)) : AbsValue(Const::of(op.value));
    case OpKind::BvConst: return BvSet::of(op.a, {op.value});
    case OpKind::And:
    case OpKind::Or: {
        const BoolSet& x = args[0].boolset();
        const BoolSet& y = args[1].boolset();
        if (x.is_empty() || y.is_empty()) {
            return BoolSet::empty();
        }
        unsigned bits = 0;
        for (bool p : {false, true}) {
            for (bool q : {false, true}) {
                if (x.has(p) && y.has(q)) {
                    bits |= BoolSet::of(op.kind == OpKind::And ? (p && q) : (p || q)).bits();
                }
            }
        }
        return BoolSet::from_bits(bits);
    }
    case OpKind::Not: {
        const BoolSet& x = args[0].boolset();
        return BoolSet::from_bits((x.has(false) ? 2U : 0U) | (x.has(true) ? 1U : 0U));
    }
    case OpKind::Add:
    case OpKind::Sub:
    case OpKind::Mul:
    case OpKind::Div: return arith(op.kind, args[0], args[1]);
    case OpKind::Neg: return negate(args[0]);
    case OpKind::Lt:
    case OpKind::Le: return compare(op.kind, args[0], args[1]);
    case OpKind::Eq: return equal(args[0], args[1]);
    case OpKind::Mk: {
        std::vector<AbsValue> elems(args.begin(), args.end());
        AbsValue t(std::move(elems));
        return t.is_empty() ? empty_like(t) : t;
    }
    case OpKind::Get: {
        const AbsValue& t = args[0];
        const AbsValue& c = t.elements().at(op.a);
        return t.is_empty() ? empty_like(c) : c;
    }
    case OpKind::Extract: {
        const unsigned hi = op.a;
        const unsigned lo = op.b;
        return map_bv(args[0].bvset(), hi - lo + 1, [&](const Integer& v) { return extract_bits(v, hi, lo); });
    }
    case OpKind::Concat: {
        const BvSet& x = args[0].bvset();
        const BvSet& y = args[1].bvset();
        const unsigned w = x.width() + y.width();
        if (x.is_empty() || y.is_empty()) {
            return BvSet::empty(w);
        }
        if (x.is_top() || y.is_top() || x.values().size() * y.values().size() > BvSet::kCap) {
            return BvSet::top(w);
        }
        std::set<Integer> out;
        for (const auto& a : x.values()) {
            for (const auto& b : y.values()) {
                out.insert((a << y.width()) | b);
            }
        }
        return BvSet::of(w, std::move(out));
    }
    }
    throw Error("transfer: unknown operator");
}

namespace {

// Preimage of truncating division by the non-zero constant c.
Interval div_preimage(const Interval& r, const Integer& c) {
    if (r.is_empty()) {
        return r;
    }
    if (c < 0) {
        return div_preimage(neg(r), -c);
    }
    Bound lo = Bound::neg_inf();
    if (r.lo().finite()) {
        const Integer& z = r.lo().value();
        lo = z > 0 ? Bound(Integer(z * c)) : Bound(Integer(z * c - (c - 1)));
    }
    Bound hi = Bound::pos_inf();
    if (r.hi().finite()) {
        const Integer& z = r.hi().value();
        hi = z < 0 ? Bound(Integer(z * c)) : Bound(Integer(z * c + (c - 1)));
    }
    return Interval::range(lo, hi);
}

std::optional<Integer> int_constant(const AbsValue& a) {
    if (is_interval(a)) {
        return a.interval().singleton();
    }
    return a.constant().value();
}

bool may_be_zero(const AbsValue& a) {
    if (is_interval(a)) {
        return a.interval().contains(0);
    }
    const Const& c = a.constant();
    return c.is_top() || (c.value() && *c.value() == 0);
}

Interval below(const Bound& b) { return Interval::range(Bound::neg_inf(), b); }
Interval above(const Bound& b) { return Interval::range(b, Bound::pos_inf()); }

Bound incr(const Bound& b) { return b.finite() ? Bound(Integer(b.value() + 1)) : b; }
Bound decr(const Bound& b) { return b.finite() ? Bound(Integer(b.value() - 1)) : b; }

void refine_compare(OpKind k, bool truth, std::vector<AbsValue>& a) {
    if (!is_interval(a[0])) {
        return;
    }
    Interval x = a[0].interval();
    Interval y = a[1].interval();
    const bool strict = k == OpKind::Lt;
    if (truth) {
        // x < y  (x <= y)
        x = meet(x, below(strict ? decr(y.hi()) : y.hi()));
        y = meet(y, above(strict ? incr(x.lo()) : x.lo()));
    } else {
        // x >= y  (x > y)
        x = meet(x, above(strict ? y.lo() : incr(y.lo())));
        y = meet(y, below(strict ? x.hi() : decr(x.hi())));
    }
    a[0] = x;
    a[1] = y;
}

AbsValue exclude(const AbsValue& x, const AbsValue& point) {
    if (is_interval(x)) {
        Interval i = x.interval();
        auto c = point.interval().singleton();
        if (!c || i.is_empty()) {
            return x;
        }
        if (i.lo() == Bound(*c)) {
            i = Interval::range(Bound(Integer(*c + 1)), i.hi());
        }
        if (!i.is_empty() && i.hi() == Bound(*c)) {
            i = Interval::range(i.lo(), Bound(Integer(*c - 1)));
        }
        return i;
    }
    if (std::holds_alternative<BoolSet>(x.rep())) {
        const BoolSet& p = point.boolset();
        if (p.bits() == 1 || p.bits() == 2) {
            return BoolSet::from_bits(x.boolset().bits() & ~p.bits());
        }
        return x;
    }
    if (std::holds_alternative<BvSet>(x.rep())) {
        const BvSet& s = x.bvset();
        const BvSet& p = point.bvset();
        if (s.is_top() || p.is_top() || p.values().size() != 1) {
            return x;
        }
        std::set<Integer> v = s.values();
        v.erase(*p.values().begin());
        return BvSet::of(s.width(), std::move(v));
    }
    return x;
}

}  // namespace

std::vector<AbsValue> refine_args(const TheoryOp& op, const AbsValue& result, std::span<const AbsValue> args,
                                  const LatticeConfig& cfg) {
    std::vector<AbsValue> a(args.begin(), args.end());
    if (a.empty()) {
        return a;
    }
    auto all_empty = [&] {
        for (auto& x : a) {
            x = empty_like(x);
        }
        return a;
    };
    const bool strict_total = op.kind != OpKind::Div;

    if (result.is_empty()) {
        if (strict_total) {
            return all_empty();
        }
        // x / y is ⊥ with live arguments only when y = 0.
        a[1] = meet(a[1], transfer(TheoryOp::int_const(0), {}, cfg));
        if (a[1].is_empty()) {
            return all_empty();
        }
        return a;
    }

    switch (op.kind) {
    case OpKind::Add:
        a[0] = meet(a[0], arith(OpKind::Sub, result, a[1]));
        a[1] = meet(a[1], arith(OpKind::Sub, result, a[0]));
        break;
    case OpKind::Sub:
        a[0] = meet(a[0], arith(OpKind::Add, result, a[1]));
        a[1] = meet(a[1], arith(OpKind::Sub, a[0], result));
        break;
    case OpKind::Neg: a[0] = meet(a[0], negate(result)); break;
    case OpKind::Div:
        if (auto c = int_constant(a[1]); c && *c != 0 && is_interval(a[0])) {
            a[0] = meet(a[0], div_preimage(result.interval(), *c));
        }
        break;
    case OpKind::Lt:
    case OpKind::Le: {
        const BoolSet& r = result.boolset();
        if (r.bits() == 1 || r.bits() == 2) {
            refine_compare(op.kind, r.has(true), a);
        }
        break;
    }
    case OpKind::Eq: {
        const BoolSet& r = result.boolset();
        if (r.bits() == 2) {
            AbsValue m = meet(a[0], a[1]);
            a[0] = m;
            a[1] = m;
        } else if (r.bits() == 1) {
            if (is_singleton(a[1]) && !a[1].is_tuple()) {
                a[0] = exclude(a[0], a[1]);
            }
            if (is_singleton(a[0]) && !a[0].is_tuple()) {
                a[1] = exclude(a[1], a[0]);
            }
        }
        break;
    }
    case OpKind::Not: a[0] = meet(a[0], transfer(op, std::span<const AbsValue>(&result, 1), cfg)); break;
    case OpKind::And:
    case OpKind::Or: {
        const BoolSet& r = result.boolset();
        const bool absorbing = op.kind == OpKind::Or;  // value that forces the result
        if (r.bits() == BoolSet::of(!absorbing).bits()) {
            a[0] = meet(a[0], BoolSet::of(!absorbing));
            a[1] = meet(a[1], BoolSet::of(!absorbing));
        } else if (r.bits() == BoolSet::of(absorbing).bits()) {
            if (a[0].boolset() == BoolSet::of(!absorbing)) {
                a[1] = meet(a[1], BoolSet::of(absorbing));
            }
            if (a[1].boolset() == BoolSet::of(!absorbing)) {
                a[0] = meet(a[0], BoolSet::of(absorbing));
            }
        }
        break;
    }
    case OpKind::Get: {
        std::vector<AbsValue> elems = a[0].elements();
        elems.at(op.a) = meet(elems.at(op.a), result);
        a[0] = AbsValue(std::move(elems));
        break;
    }
    case OpKind::Mk:
        for (std::size_t i = 0; i < a.size(); ++i) {
            a[i] = meet(a[i], result.elements()[i]);
        }
        break;
    case OpKind::Extract: {
        const BvSet& s = a[0].bvset();
        const BvSet& r = result.bvset();
        if (!s.is_top() && !r.is_top()) {
            std::set<Integer> keep;
            for (const auto& v : s.values()) {
                if (r.values().contains(extract_bits(v, op.a, op.b))) {
                    keep.insert(v);
                }
            }
            a[0] = BvSet::of(s.width(), std::move(keep));
        }
        break;
    }
    case OpKind::Concat: {
        const BvSet& r = result.bvset();
        if (!r.is_top()) {
            const unsigned lw = a[1].bvset().width();
            std::set<Integer> hi;
            std::set<Integer> lo;
            for (const auto& v : r.values()) {
                hi.insert(v >> lw);
                lo.insert(extract_bits(v, lw - 1, 0));
            }
            a[0] = meet(a[0], BvSet::of(a[0].bvset().width(), std::move(hi)));
            a[1] = meet(a[1], BvSet::of(lw, std::move(lo)));
        }
        break;
    }
    default: break;
    }

    for (const auto& x : a) {
        if (x.is_empty()) {
            return all_empty();
        }
    }
    if (strict_total || !may_be_zero(a[1])) {
        if (meet(transfer(op, a, cfg), result).is_empty()) {
            return all_empty();
        }
    } else if (meet(transfer(op, a, cfg), result).is_empty()) {
        // Only the ⊥ quotient remains possible.
        a[1] = meet(a[1], transfer(TheoryOp::int_const(0), {}, cfg));
    }
    return a;
}

}  // namespace laf
