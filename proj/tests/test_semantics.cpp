// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "laf/semantics.hpp"
#include "laf/text.hpp"

using namespace laf;

TEST_CASE("dead values do not block unrelated definitions") {
    Builder b;
    Var f = b.lit_bool("f", false);
    Var one = b.lit_int("one", 1);
    Var x = b.assume("x", f, one);
    Var y = b.lit_int("y", 2);
    Term t = b.term(y);
    EnvSet envs = collect(t, EnumBudget{});
    REQUIRE(envs.size() == 1);
    const Env& g = *envs.begin();
    CHECK(g[x.id()]->is_bottom());
    CHECK(*g[y.id()] == Value::integer(2));
}

TEST_CASE("nondet subtraction") {
    Builder b;
    Var two = b.lit_int("two", 2);
    Var seven = b.lit_int("seven", 7);
    Var u = b.nondet("u", two, seven);
    Var v = b.nondet("v", two, seven);
    Var d = b.binary("d", OpKind::Sub, u, v);
    Var s = b.binary("s", OpKind::Sub, u, u);
    CHECK(result_values(b.term(d), EnumBudget{}) ==
          std::set<Value>{Value::integer(-5), Value::integer(0), Value::integer(5)});
    CHECK(result_values(b.term(s), EnumBudget{}) == std::set<Value>{Value::integer(0)});
}

TEST_CASE("doubling loop under a three-iteration cap") {
    Builder b;
    Var x0 = b.lit_int("x0", 1);
    Var m = b.mu("m", "x", x0, [](Builder& body, Var x) { return body.binary("xx", OpKind::Add, x, x); });
    Term t = b.term(m);
    EnumBudget budget;
    budget.max_mu_iters = 3;
    budget.mu_cap = EnumBudget::MuCap::Truncate;
    // Hand-unrolled: 1, 1+1, 2+2, 4+4.
    const std::set<Value> expect{Value::integer(1), Value::integer(2), Value::integer(4), Value::integer(8)};
    CHECK(result_values(t, budget) == expect);
    EnvSet machine = reachable_results(t, budget);
    CHECK(machine == collect(t, budget));

    budget.mu_cap = EnumBudget::MuCap::Error;
    CHECK_THROWS_AS(collect(t, budget), BudgetExceeded);
    CHECK_THROWS_AS(reachable_results(t, budget), BudgetExceeded);
}

TEST_CASE("bottom is strict through every operator") {
    const Value bot = Value::bottom();
    const Value i = Value::integer(3);
    for (OpKind k : {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Div, OpKind::Lt, OpKind::Le, OpKind::Eq}) {
        std::vector<Value> a{bot, i};
        std::vector<Value> c{i, bot};
        CHECK(apply_op(TheoryOp::simple(k), a).is_bottom());
        CHECK(apply_op(TheoryOp::simple(k), c).is_bottom());
    }
    std::vector<Value> one{bot};
    CHECK(apply_op(TheoryOp::simple(OpKind::Neg), one).is_bottom());
    CHECK(apply_op(TheoryOp::simple(OpKind::Not), one).is_bottom());
    CHECK(apply_op(TheoryOp::get(0), one).is_bottom());
    CHECK(apply_op(TheoryOp::extract(3, 0), one).is_bottom());
    CHECK(Value::tuple({i, bot}).is_bottom());
}

TEST_CASE("integer division truncates and dies on zero") {
    auto div = [](long a, long b) {
        std::vector<Value> args{Value::integer(a), Value::integer(b)};
        return apply_op(TheoryOp::simple(OpKind::Div), args);
    };
    CHECK(div(7, 2) == Value::integer(3));
    CHECK(div(-7, 2) == Value::integer(-3));
    CHECK(div(7, -2) == Value::integer(-3));
    CHECK(div(-7, -2) == Value::integer(3));
    CHECK(div(5, 0).is_bottom());
}

TEST_CASE("machine rules") {
    SUBCASE("do not enter loop keeps the init value") {
        Builder b;
        Var x0 = b.lit_int("x0", 5);
        Var m = b.mu("m", "x", x0, [](Builder& body, Var x) { return body.unary("n", OpKind::Neg, x); });
        Term t = b.term(m);
        MachineState s = initial_state(t);
        s = step(s, EnumBudget{}).front();
        auto succ = step(s, EnumBudget{});
        REQUIRE(succ.size() == 2);
        CHECK(succ[0].frames.size() == 1);
        CHECK(*succ[0].frames[0].env[m.id()] == Value::integer(5));
        CHECK(succ[1].frames.size() == 2);
    }
    SUBCASE("assume false kills") {
        Builder b;
        Var f = b.lit_bool("f", false);
        Var x = b.assume("x", f, f);
        MachineState s = initial_state(b.term(x));
        s = step(s, EnumBudget{}).front();
        auto succ = step(s, EnumBudget{});
        REQUIRE(succ.size() == 1);
        CHECK(succ[0].frames[0].env[x.id()]->is_bottom());
        CHECK(succ[0].terminal());
        CHECK(step(succ[0], EnumBudget{}).empty());
    }
}

TEST_CASE("single definition term") {
    Term t = parse_term("(let x int 12)\n(in x)");
    EnvSet r = reachable_results(t, EnumBudget{});
    REQUIRE(r.size() == 1);
    CHECK(*r.begin()->at(0) == Value::integer(12));
}

TEST_CASE("unknown enumeration") {
    EnumBudget b;
    CHECK(enumerate_sort(Sort::integer(), b).size() == 17);
    CHECK(enumerate_sort(Sort::bitvec(4), b).size() == 16);
    CHECK(enumerate_sort(Sort::bitvec(16), b).size() == 17);
    CHECK(enumerate_sort(Sort::tuple({Sort::boolean(), Sort::boolean()}), b).size() == 4);
}
