// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "laf/lattice.hpp"

using namespace laf;

namespace {

const LatticeConfig kItv{};

Interval itv(long lo, long hi) { return Interval::range(Bound(Integer(lo)), Bound(Integer(hi))); }

// Random interval over [-6, 6] with occasional infinite bounds.
Interval random_interval(std::mt19937_64& rng) {
    const long a = static_cast<long>(rng() % 13) - 6;
    const long b = static_cast<long>(rng() % 13) - 6;
    Bound lo(Integer(std::min(a, b)));
    Bound hi(Integer(std::max(a, b)));
    if (rng() % 6 == 0) {
        lo = Bound::neg_inf();
    }
    if (rng() % 6 == 0) {
        hi = Bound::pos_inf();
    }
    if (rng() % 15 == 0) {
        return Interval::empty();
    }
    return Interval::range(lo, hi);
}

// Members of an interval clipped to the window [-12, 12].
std::vector<Integer> members(const Interval& i) {
    std::vector<Integer> out;
    for (long z = -12; z <= 12; ++z) {
        if (i.contains(z)) {
            out.emplace_back(z);
        }
    }
    return out;
}

Value apply2(OpKind k, const Integer& a, const Integer& b) {
    std::vector<Value> args{Value::integer(a), Value::integer(b)};
    return apply_op(TheoryOp::simple(k), args);
}

}  // namespace

TEST_CASE("interval examples") {
    CHECK(join(itv(-8, -1), itv(0, 8)) == itv(-8, 8));
    CHECK(widen(itv(0, 1), itv(0, 2)) == Interval::range(Bound(0), Bound::pos_inf()));
    const std::vector<Integer> th = LatticeConfig::default_thresholds();
    CHECK(widen(itv(0, 1), itv(0, 2), th) == itv(0, 8));
    CHECK(div(itv(-8, 8), itv(9, 9)) == itv(0, 0));
    const Interval x = Interval::range(Bound::neg_inf(), Bound(-1));
    std::vector<AbsValue> args{x, itv(0, 0)};
    CHECK(transfer(TheoryOp::simple(OpKind::Lt), args, kItv) == AbsValue(BoolSet::of(true)));
    // Brute force over the window part of x.
    for (long z = -8; z <= -1; ++z) {
        CHECK(apply2(OpKind::Lt, z, 0) == Value::boolean(true));
    }
    CHECK(add(itv(-3, 7), itv(0, 0)) == itv(-3, 7));
    CHECK(div(itv(1, 5), itv(0, 0)).is_empty());
    CHECK(div(Interval::top(), Interval::range(Bound(1), Bound::pos_inf())) == Interval::top());
}

TEST_CASE("gamma membership") {
    CHECK(gamma_contains(AbsValue(itv(0, 8)), Value::integer(5)));
    CHECK(gamma_contains(AbsValue(Interval::empty()), Value::bottom()));
    CHECK_FALSE(gamma_contains(AbsValue(BoolSet::of(false)), Value::boolean(true)));
    CHECK_FALSE(gamma_contains(AbsValue(Interval::empty()), Value::integer(0)));
    AbsValue t(std::vector<AbsValue>{itv(0, 1), BoolSet::top()});
    CHECK(gamma_contains(t, Value::tuple({Value::integer(1), Value::boolean(false)})));
    CHECK_FALSE(gamma_contains(t, Value::tuple({Value::integer(2), Value::boolean(false)})));
}

TEST_CASE("interval transfers satisfy condition 3 by enumeration") {
    std::mt19937_64 rng(7);
    for (int round = 0; round < 400; ++round) {
        const Interval a = random_interval(rng);
        const Interval b = random_interval(rng);
        for (OpKind k : {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Lt, OpKind::Le, OpKind::Eq}) {
            std::vector<AbsValue> args{a, b};
            const AbsValue out = transfer(TheoryOp::simple(k), args, kItv);
            for (const auto& x : members(a)) {
                for (const auto& y : members(b)) {
                    const Value v = apply2(k, x, y);
                    INFO(a.str(), " ", b.str(), " op ", static_cast<int>(k), " ", x.str(), " ", y.str());
                    CHECK(gamma_contains(out, v));
                }
            }
        }
    }
}

TEST_CASE("interval division corners with infinite bounds") {
    // Divisors reach far beyond the window: x / d for large d is 0.
    const Interval d = Interval::range(Bound(2), Bound::pos_inf());
    const Interval a = itv(-7, 9);
    const Interval q = div(a, d);
    for (long x = -7; x <= 9; ++x) {
        for (long y : {2L, 3L, 5L, 1000L, 1000000L}) {
            CHECK(q.contains(tdiv(x, y)));
        }
    }
    CHECK(q == itv(-3, 4));
}

TEST_CASE("backward refinement keeps every consistent argument") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 400; ++round) {
        const Interval a = random_interval(rng);
        const Interval b = rng() % 3 == 0 ? itv(static_cast<long>(rng() % 7) - 3, 0) : random_interval(rng);
        for (OpKind k : {OpKind::Add, OpKind::Sub, OpKind::Div, OpKind::Mul}) {
            const Interval r = random_interval(rng);
            std::vector<AbsValue> args{a, b};
            const auto refined = refine_args(TheoryOp::simple(k), AbsValue(r), args, kItv);
            for (const auto& x : members(a)) {
                for (const auto& y : members(b)) {
                    const Value v = apply2(k, x, y);
                    if (v.is_bottom() || r.contains(v.as_int())) {
                        INFO(a.str(), " ", b.str(), " -> ", r.str(), " at ", x.str(), ",", y.str());
                        CHECK(gamma_contains(refined[0], Value::integer(x)));
                        CHECK(gamma_contains(refined[1], Value::integer(y)));
                    }
                }
            }
        }
        for (OpKind k : {OpKind::Lt, OpKind::Le, OpKind::Eq}) {
            for (unsigned bits : {1U, 2U, 3U}) {
                const BoolSet r = BoolSet::from_bits(bits);
                std::vector<AbsValue> args{a, b};
                const auto refined = refine_args(TheoryOp::simple(k), AbsValue(r), args, kItv);
                for (const auto& x : members(a)) {
                    for (const auto& y : members(b)) {
                        if (r.has(apply2(k, x, y).as_bool())) {
                            CHECK(gamma_contains(refined[0], Value::integer(x)));
                            CHECK(gamma_contains(refined[1], Value::integer(y)));
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("division preimage") {
    std::vector<AbsValue> args{Interval::top(), itv(9, 9)};
    auto r = refine_args(TheoryOp::simple(OpKind::Div), AbsValue(itv(0, 0)), args, kItv);
    CHECK(r[0] == AbsValue(itv(-8, 8)));
    std::vector<AbsValue> neg_args{Interval::top(), itv(-3, -3)};
    r = refine_args(TheoryOp::simple(OpKind::Div), AbsValue(itv(1, 2)), neg_args, kItv);
    CHECK(r[0] == AbsValue(itv(-8, -3)));
    // A divisor that may be zero keeps the dividend unrefined.
    std::vector<AbsValue> z{itv(1, 5), itv(0, 1)};
    r = refine_args(TheoryOp::simple(OpKind::Div), AbsValue(itv(100, 100)), z, kItv);
    CHECK(r[0] == AbsValue(itv(1, 5)));
    CHECK(r[1] == AbsValue(itv(0, 0)));
}

TEST_CASE("boolean refinement") {
    std::vector<AbsValue> args{BoolSet::top(), BoolSet::of(true)};
    auto r = refine_args(TheoryOp::simple(OpKind::And), AbsValue(BoolSet::of(false)), args, kItv);
    CHECK(r[0] == AbsValue(BoolSet::of(false)));
    r = refine_args(TheoryOp::simple(OpKind::Or), AbsValue(BoolSet::of(false)), args, kItv);
    CHECK(r[0].is_empty());
    std::vector<AbsValue> one{BoolSet::top()};
    r = refine_args(TheoryOp::simple(OpKind::Not), AbsValue(BoolSet::of(true)), one, kItv);
    CHECK(r[0] == AbsValue(BoolSet::of(false)));
}

TEST_CASE("widening stabilises ascending chains quickly") {
    std::mt19937_64 rng(3);
    for (int round = 0; round < 200; ++round) {
        Interval chain = random_interval(rng);
        Interval w = chain;
        int changes = 0;
        for (int i = 0; i < 20; ++i) {
            chain = join(chain, random_interval(rng));
            Interval next = widen(w, chain);
            if (!(next == w)) {
                ++changes;
            }
            CHECK(leq(chain, next));
            w = next;
        }
        CHECK(changes <= 3);
    }
}

TEST_CASE("join is idempotent, commutative and associative") {
    std::mt19937_64 rng(5);
    for (int round = 0; round < 300; ++round) {
        const AbsValue a = random_interval(rng);
        const AbsValue b = random_interval(rng);
        const AbsValue c = random_interval(rng);
        CHECK(join(a, a) == a);
        CHECK(join(a, b) == join(b, a));
        CHECK(join(join(a, b), c) == join(a, join(b, c)));
        CHECK(leq(a, join(a, b)));
    }
}

TEST_CASE("constants and bitvector sets") {
    LatticeConfig cfg;
    cfg.int_mode = IntMode::Constant;
    std::vector<AbsValue> args{Const::of(6), Const::of(4)};
    CHECK(transfer(TheoryOp::simple(OpKind::Add), args, cfg) == AbsValue(Const::of(10)));
    CHECK(transfer(TheoryOp::simple(OpKind::Lt), args, cfg) == AbsValue(BoolSet::of(false)));
    std::vector<AbsValue> zero{Const::top(), Const::of(0)};
    CHECK(transfer(TheoryOp::simple(OpKind::Mul), zero, cfg) == AbsValue(Const::of(0)));
    CHECK(transfer(TheoryOp::simple(OpKind::Div), zero, cfg).is_empty());
    CHECK(join(AbsValue(Const::of(1)), AbsValue(Const::of(2))) == AbsValue(Const::top()));

    const BvSet x = BvSet::of(16, {0x1234, 0xabcd});
    std::vector<AbsValue> one{x};
    const AbsValue lo = transfer(TheoryOp::extract(7, 0), one, kItv);
    const AbsValue hi = transfer(TheoryOp::extract(15, 8), one, kItv);
    CHECK(lo == AbsValue(BvSet::of(8, {0x34, 0xcd})));
    std::vector<AbsValue> parts{hi, lo};
    const AbsValue back = transfer(TheoryOp::simple(OpKind::Concat), parts, kItv);
    CHECK(leq(AbsValue(x), back));
    std::set<Integer> many;
    for (int i = 0; i < 20; ++i) {
        many.insert(i);
    }
    CHECK(BvSet::of(8, many).is_top());
}
