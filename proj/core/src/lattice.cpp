// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/lattice.hpp"

#include <algorithm>

#include "laf/text.hpp"

namespace laf {

// ---------------------------------------------------------------- Bound

int Bound::sign() const {
    if (inf_ != 0) {
        return inf_;
    }
    return v_ < 0 ? -1 : (v_ > 0 ? 1 : 0);
}

std::string Bound::str() const {
    if (inf_ < 0) {
        return "-oo";
    }
    if (inf_ > 0) {
        return "+oo";
    }
    return v_.str();
}

bool operator<(const Bound& a, const Bound& b) {
    if (a.inf_ != b.inf_) {
        return a.inf_ < b.inf_;
    }
    return a.inf_ == 0 && a.v_ < b.v_;
}

namespace {

Bound inf_of_sign(int s) { return s < 0 ? Bound::neg_inf() : Bound::pos_inf(); }

// Sum where at most one operand is infinite, or both share a sign.
Bound add_b(const Bound& a, const Bound& b) {
    if (!a.finite()) {
        return a;
    }
    if (!b.finite()) {
        return b;
    }
    return Bound(a.value() + b.value());
}

Bound neg_b(const Bound& a) {
    if (!a.finite()) {
        return inf_of_sign(-a.sign());
    }
    return Bound(Integer(-a.value()));
}

// 0 * inf = 0: every member is a finite integer.
Bound mul_b(const Bound& a, const Bound& b) {
    if (a.sign() == 0 || b.sign() == 0) {
        return Bound(0);
    }
    if (!a.finite() || !b.finite()) {
        return inf_of_sign(a.sign() * b.sign());
    }
    return Bound(a.value() * b.value());
}

const Bound& min_b(const Bound& a, const Bound& b) { return b < a ? b : a; }
const Bound& max_b(const Bound& a, const Bound& b) { return a < b ? b : a; }

}  // namespace

// ---------------------------------------------------------------- Interval

Interval Interval::empty() {
    Interval i;
    i.empty_ = true;
    i.lo_ = Bound(1);
    i.hi_ = Bound(0);
    return i;
}

Interval Interval::range(Bound lo, Bound hi) {
    if (lo.is_pos_inf() || hi.is_neg_inf() || hi < lo) {
        return empty();
    }
    return {std::move(lo), std::move(hi)};
}

std::optional<Integer> Interval::singleton() const {
    if (!empty_ && lo_.finite() && lo_ == hi_) {
        return lo_.value();
    }
    return std::nullopt;
}

bool Interval::contains(const Integer& z) const { return !empty_ && lo_ <= Bound(z) && Bound(z) <= hi_; }

std::string Interval::str() const {
    if (empty_) {
        return "empty";
    }
    return "[" + lo_.str() + ";" + hi_.str() + "]";
}

bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) {
        return a.empty_ == b.empty_;
    }
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
}

Interval add(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    return Interval::range(add_b(a.lo(), b.lo()), add_b(a.hi(), b.hi()));
}

Interval neg(const Interval& a) {
    if (a.is_empty()) {
        return a;
    }
    return Interval::range(neg_b(a.hi()), neg_b(a.lo()));
}

Interval sub(const Interval& a, const Interval& b) { return add(a, neg(b)); }

Interval mul(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    const Bound c[4] = {mul_b(a.lo(), b.lo()), mul_b(a.lo(), b.hi()), mul_b(a.hi(), b.lo()), mul_b(a.hi(), b.hi())};
    Bound lo = c[0];
    Bound hi = c[0];
    for (const auto& x : c) {
        lo = min_b(lo, x);
        hi = max_b(hi, x);
    }
    return Interval::range(lo, hi);
}

namespace {

// Truncating quotients of a by divisors in d, where d.lo >= 1. Extremes
// are reached at the corners; inf/inf may be 0 or inf.
Interval div_pos(const Interval& a, const Interval& d) {
    std::vector<Bound> corners;
    for (const Bound* x : {&a.lo(), &a.hi()}) {
        for (const Bound* y : {&d.lo(), &d.hi()}) {
            if (x->finite() && y->finite()) {
                corners.emplace_back(Integer(tdiv(x->value(), y->value())));
            } else if (x->finite()) {
                corners.emplace_back(0);
            } else if (y->finite()) {
                corners.push_back(*x);
            } else {
                corners.emplace_back(0);
                corners.push_back(*x);
            }
        }
    }
    Bound lo = corners[0];
    Bound hi = corners[0];
    for (const auto& c : corners) {
        lo = min_b(lo, c);
        hi = max_b(hi, c);
    }
    return Interval::range(lo, hi);
}

}  // namespace

Interval div(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    const Interval pos = meet(b, Interval::range(Bound(1), Bound::pos_inf()));
    const Interval negp = meet(b, Interval::range(Bound::neg_inf(), Bound(-1)));
    Interval out = Interval::empty();
    if (!pos.is_empty()) {
        out = join(out, div_pos(a, pos));
    }
    if (!negp.is_empty()) {
        out = join(out, neg(div_pos(a, neg(negp))));
    }
    return out;
}

Interval join(const Interval& a, const Interval& b) {
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return {min_b(a.lo(), b.lo()), max_b(a.hi(), b.hi())};
}

Interval meet(const Interval& a, const Interval& b) {
    if (a.is_empty() || b.is_empty()) {
        return Interval::empty();
    }
    return Interval::range(max_b(a.lo(), b.lo()), min_b(a.hi(), b.hi()));
}

Interval widen(const Interval& a, const Interval& b, std::span<const Integer> thresholds) {
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    Bound lo = a.lo();
    if (b.lo() < a.lo()) {
        lo = Bound::neg_inf();
        for (const auto& t : thresholds) {
            if (Bound(t) <= b.lo() && lo < Bound(t)) {
                lo = Bound(t);
            }
        }
    }
    Bound hi = a.hi();
    if (a.hi() < b.hi()) {
        hi = Bound::pos_inf();
        for (const auto& t : thresholds) {
            if (b.hi() <= Bound(t) && Bound(t) < hi) {
                hi = Bound(t);
            }
        }
    }
    return {lo, hi};
}

bool leq(const Interval& a, const Interval& b) {
    if (a.is_empty()) {
        return true;
    }
    if (b.is_empty()) {
        return false;
    }
    return b.lo() <= a.lo() && a.hi() <= b.hi();
}

// ---------------------------------------------------------------- scalars

std::string BoolSet::str() const {
    switch (bits_) {
    case 0: return "{}";
    case 1: return "{false}";
    case 2: return "{true}";
    default: return "{true;false}";
    }
}

std::optional<Integer> Const::value() const {
    if (kind_ == Kind::Value) {
        return v_;
    }
    return std::nullopt;
}

std::string Const::str() const {
    switch (kind_) {
    case Kind::Empty: return "empty";
    case Kind::Top: return "top";
    default: return v_.str();
    }
}

BvSet BvSet::of(unsigned width, std::set<Integer> vals) {
    if (vals.size() > kCap) {
        return top(width);
    }
    return BvSet(width, false, std::move(vals));
}

std::string BvSet::str() const {
    if (top_) {
        return "top";
    }
    std::string out = "{";
    bool first = true;
    for (const auto& v : vals_) {
        out += (first ? "" : ";") + print_literal(TheoryOp::bv_const(width_, v));
        first = false;
    }
    return out + "}";
}

// ---------------------------------------------------------------- AbsValue

AbsValue AbsValue::top(const Sort& s, const LatticeConfig& cfg) {
    switch (s.kind()) {
    case Sort::Kind::Bool: return BoolSet::top();
    case Sort::Kind::Int:
        return cfg.int_mode == IntMode::Interval ? AbsValue(Interval::top()) : AbsValue(Const::top());
    case Sort::Kind::BitVec: return BvSet::top(s.width());
    case Sort::Kind::Tuple: {
        std::vector<AbsValue> elems;
        for (const auto& e : s.elements()) {
            elems.push_back(top(e, cfg));
        }
        return elems;
    }
    }
    throw Error("unknown sort");
}

AbsValue AbsValue::empty(const Sort& s, const LatticeConfig& cfg) {
    switch (s.kind()) {
    case Sort::Kind::Bool: return BoolSet::empty();
    case Sort::Kind::Int:
        return cfg.int_mode == IntMode::Interval ? AbsValue(Interval::empty()) : AbsValue(Const::empty());
    case Sort::Kind::BitVec: return BvSet::empty(s.width());
    case Sort::Kind::Tuple: {
        std::vector<AbsValue> elems;
        for (const auto& e : s.elements()) {
            elems.push_back(empty(e, cfg));
        }
        return elems;
    }
    }
    throw Error("unknown sort");
}

AbsValue AbsValue::of_value(const Value& v, const Sort& s, const LatticeConfig& cfg) {
    switch (v.kind()) {
    case Value::Kind::Bottom: return empty(s, cfg);
    case Value::Kind::Bool: return BoolSet::of(v.as_bool());
    case Value::Kind::Int:
        return cfg.int_mode == IntMode::Interval ? AbsValue(Interval::point(v.as_int())) : AbsValue(Const::of(v.as_int()));
    case Value::Kind::BitVec: return BvSet::of(v.width(), {v.bits()});
    case Value::Kind::Tuple: {
        std::vector<AbsValue> elems;
        for (std::size_t i = 0; i < v.elements().size(); ++i) {
            elems.push_back(of_value(v.elements()[i], s.elements()[i], cfg));
        }
        return elems;
    }
    }
    throw Error("unknown value");
}

bool AbsValue::is_empty() const {
    return std::visit(
        [](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, std::vector<AbsValue>>) {
                return std::any_of(r.begin(), r.end(), [](const AbsValue& e) { return e.is_empty(); });
            } else {
                return r.is_empty();
            }
        },
        rep_);
}

bool AbsValue::is_top() const {
    return std::visit(
        [](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, std::vector<AbsValue>>) {
                return std::all_of(r.begin(), r.end(), [](const AbsValue& e) { return e.is_top(); });
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return r == BoolSet::top();
            } else {
                return r.is_top();
            }
        },
        rep_);
}

std::string AbsValue::str() const {
    return std::visit(
        [](const auto& r) -> std::string {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, std::vector<AbsValue>>) {
                std::string out = "<";
                for (std::size_t i = 0; i < r.size(); ++i) {
                    out += (i ? ", " : "") + r[i].str();
                }
                return out + ">";
            } else {
                return r.str();
            }
        },
        rep_);
}

namespace {

AbsValue empty_like(const AbsValue& a) {
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
                std::vector<AbsValue> out;
                for (const auto& e : r) {
                    out.push_back(empty_like(e));
                }
                return out;
            }
        },
        a.rep());
}

// Pointwise combination of two values of the same shape.
template <class F>
AbsValue zip(const AbsValue& a, const AbsValue& b, F&& f) {
    if (a.rep().index() != b.rep().index()) {
        throw Error("abstract values of different sorts");
    }
    if (a.is_tuple()) {
        const auto& x = a.elements();
        const auto& y = b.elements();
        if (x.size() != y.size()) {
            throw Error("tuple abstract values of different arity");
        }
        std::vector<AbsValue> out;
        out.reserve(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            out.push_back(zip(x[i], y[i], f));
        }
        return out;
    }
    return f(a, b);
}

Const join_c(const Const& a, const Const& b) {
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty() || a == b) {
        return a;
    }
    return Const::top();
}

Const meet_c(const Const& a, const Const& b) {
    if (a.is_top()) {
        return b;
    }
    if (b.is_top() || a == b) {
        return a;
    }
    return Const::empty();
}

BvSet join_bv(const BvSet& a, const BvSet& b) {
    if (a.is_top() || b.is_top()) {
        return BvSet::top(a.width());
    }
    std::set<Integer> u = a.values();
    u.insert(b.values().begin(), b.values().end());
    return BvSet::of(a.width(), std::move(u));
}

BvSet meet_bv(const BvSet& a, const BvSet& b) {
    if (a.is_top()) {
        return b;
    }
    if (b.is_top()) {
        return a;
    }
    std::set<Integer> i;
    std::set_intersection(a.values().begin(), a.values().end(), b.values().begin(), b.values().end(),
                          std::inserter(i, i.end()));
    return BvSet::of(a.width(), std::move(i));
}

AbsValue join_scalar(const AbsValue& a, const AbsValue& b) {
    return std::visit(
        [&](const auto& x) -> AbsValue {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep());
            if constexpr (std::is_same_v<T, Interval>) {
                return join(x, y);
            } else if constexpr (std::is_same_v<T, Const>) {
                return join_c(x, y);
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return BoolSet::from_bits(x.bits() | y.bits());
            } else if constexpr (std::is_same_v<T, BvSet>) {
                return join_bv(x, y);
            } else {
                throw Error("unreachable");
            }
        },
        a.rep());
}

AbsValue meet_scalar(const AbsValue& a, const AbsValue& b) {
    return std::visit(
        [&](const auto& x) -> AbsValue {
            using T = std::decay_t<decltype(x)>;
            const auto& y = std::get<T>(b.rep());
            if constexpr (std::is_same_v<T, Interval>) {
                return meet(x, y);
            } else if constexpr (std::is_same_v<T, Const>) {
                return meet_c(x, y);
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return BoolSet::from_bits(x.bits() & y.bits());
            } else if constexpr (std::is_same_v<T, BvSet>) {
                return meet_bv(x, y);
            } else {
                throw Error("unreachable");
            }
        },
        a.rep());
}

}  // namespace

AbsValue join(const AbsValue& a, const AbsValue& b) {
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return zip(a, b, join_scalar);
}

AbsValue meet(const AbsValue& a, const AbsValue& b) {
    AbsValue m = zip(a, b, meet_scalar);
    return m.is_empty() ? empty_like(m) : m;
}

AbsValue widen(const AbsValue& a, const AbsValue& b, const LatticeConfig& cfg) {
    if (a.is_empty()) {
        return b;
    }
    if (b.is_empty()) {
        return a;
    }
    return zip(a, b, [&](const AbsValue& x, const AbsValue& y) -> AbsValue {
        if (std::holds_alternative<Interval>(x.rep())) {
            return widen(x.interval(), y.interval(), cfg.thresholds);
        }
        // Remaining scalar lattices have finite height.
        return join_scalar(x, y);
    });
}

bool leq(const AbsValue& a, const AbsValue& b) {
    if (a.is_empty()) {
        return true;
    }
    if (b.is_empty()) {
        return false;
    }
    if (a.is_tuple()) {
        const auto& x = a.elements();
        const auto& y = b.elements();
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (!leq(x[i], y[i])) {
                return false;
            }
        }
        return true;
    }
    return join_scalar(a, b) == b;
}

bool gamma_contains(const AbsValue& a, const Value& v) {
    if (v.is_bottom()) {
        return true;
    }
    return std::visit(
        [&](const auto& r) -> bool {
            using T = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<T, Interval>) {
                return v.kind() == Value::Kind::Int && r.contains(v.as_int());
            } else if constexpr (std::is_same_v<T, Const>) {
                return v.kind() == Value::Kind::Int && !r.is_empty() && (r.is_top() || *r.value() == v.as_int());
            } else if constexpr (std::is_same_v<T, BoolSet>) {
                return v.kind() == Value::Kind::Bool && r.has(v.as_bool());
            } else if constexpr (std::is_same_v<T, BvSet>) {
                return v.kind() == Value::Kind::BitVec && v.width() == r.width() &&
                       (r.is_top() || r.values().contains(v.bits()));
            } else {
                if (v.kind() != Value::Kind::Tuple || v.elements().size() != r.size()) {
                    return false;
                }
                for (std::size_t i = 0; i < r.size(); ++i) {
                    // Tuple components are never ⊥, so emptiness is honoured here.
                    if (r[i].is_empty() || !gamma_contains(r[i], v.elements()[i])) {
                        return false;
                    }
                }
                return true;
            }
        },
        a.rep());
}

}  // namespace laf
