// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "laf/ir.hpp"
#include "laf/semantics.hpp"
#include "laf/text.hpp"
#include "laf/wf.hpp"

using namespace laf;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(LAF_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

bool has_message(const std::vector<Diagnostic>& ds, const std::string& needle) {
    for (const auto& d : ds) {
        if (d.message.find(needle) != std::string::npos) {
            return true;
        }
    }
    return false;
}

}  // namespace

TEST_CASE("append builds persistent contexts") {
    VarPool pool;
    Var x = pool.fresh("x", Sort::integer());
    Var one = pool.fresh("one", Sort::integer());
    Var y = pool.fresh("y", Sort::integer());
    Context c0;
    Context c1 = append(c0, Def{x, OpRhs{TheoryOp::int_const(12), {}}});
    CHECK(c0.size() == 0);
    CHECK(c1.size() == 1);
    Context c2 = append(c1, Def{one, OpRhs{TheoryOp::int_const(1), {}}});
    const Context before = c2;
    Context c3 = append(c2, Def{y, OpRhs{TheoryOp::simple(OpKind::Add), {x, one}}});
    CHECK(c2 == before);
    CHECK(c2.size() == 2);
    auto vals = result_values(Term{c3, y}, EnumBudget{});
    REQUIRE(vals.size() == 1);
    CHECK(*vals.begin() == Value::integer(13));

    SUBCASE("scope violation") {
        Var z = pool.fresh("z", Sort::integer());
        Var w = pool.fresh("w", Sort::integer());
        CHECK_THROWS_AS(append(c1, Def{w, OpRhs{TheoryOp::simple(OpKind::Neg), {z}}}), Error);
    }
    SUBCASE("duplicate binder") {
        CHECK_THROWS_AS(append(c1, Def{x, OpRhs{TheoryOp::int_const(3), {}}}), Error);
    }
    SUBCASE("sort mismatch") {
        Var b = pool.fresh("b", Sort::boolean());
        CHECK_THROWS_AS(append(c1, Def{b, OpRhs{TheoryOp::simple(OpKind::Neg), {x}}}), Error);
    }
}

TEST_CASE("builder allocates ids in definition order") {
    Builder b;
    Var init = b.lit_int("i", 1);
    Var m = b.mu("m", "s", init, [](Builder& body, Var s) { return body.binary("d", OpKind::Add, s, s); });
    Term t = b.term(m);
    std::vector<VarId> ids;
    for_each_binder(t.ctx, [&](const Var& v) { ids.push_back(v.id()); });
    CHECK(ids == std::vector<VarId>{0, 1, 2, 3});
    CHECK(check_wf(t).empty());
    CHECK_THROWS_AS(b.binary("bad", OpKind::Add, init, Var{}), Error);
}

TEST_CASE("fixtures are well formed") {
    for (const char* f : {"fig1.laf", "fig2.laf", "fig10.laf"}) {
        CAPTURE(f);
        Term t = parse_term(slurp(f));
        CHECK(check_wf(t).empty());
    }
    Term fig10 = parse_term(slurp("fig10.laf"));
    CHECK(count_defs(fig10.ctx) == 27);
}

TEST_CASE("check_wf reports sort errors and duplicates") {
    VarPool pool;
    Var y = pool.fresh("y", Sort::integer());
    Var z = pool.fresh("z", Sort::integer());
    Var x = pool.fresh("x", Sort::integer());
    Context ctx({Def{y, OpRhs{TheoryOp::int_const(1), {}}}, Def{z, OpRhs{TheoryOp::int_const(2), {}}},
                 Def{x, AssumeRhs{y, z}}});
    auto ds = check_wf(Term{ctx, x});
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].path == std::vector<std::size_t>{2});
    CHECK(has_message(ds, "assume condition"));

    Context dup({Def{y, OpRhs{TheoryOp::int_const(1), {}}}, Def{y, OpRhs{TheoryOp::int_const(2), {}}}});
    auto dd = check_wf(Term{dup, y});
    CHECK(has_message(dd, "duplicate binder"));

    Context scope({Def{x, OpRhs{TheoryOp::simple(OpKind::Neg), {y}}}});
    CHECK(has_message(check_wf(Term{scope, x}), "not in scope"));
}

TEST_CASE("mu body variables are not visible after the loop") {
    const char* text = R"((let i int 0)
(let m int (mu (s)
  (let d int (add s s))
  d i))
(let e int (neg d))
(in e))";
    CHECK_THROWS_AS(parse_term(text), ParseError);
}

TEST_CASE("sort_of") {
    Term t = parse_term(slurp("fig1.laf"));
    CHECK(sort_of(t, *find_var(t, "c1")) == Sort::boolean());
    CHECK(sort_of(t, *find_var(t, "t1")) == Sort::tuple({Sort::integer(), Sort::integer()}));
    Var ghost(999, std::make_shared<const VarInfo>(VarInfo{"ghost", Sort::integer()}));
    CHECK_THROWS_AS(sort_of(t, ghost), Error);
}

TEST_CASE("parse errors carry positions") {
    try {
        (void)parse_term("(let y int 1)\n(let x int (nondet y))\n(in x)");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("expects 2 arguments") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_term("(let x (bv 4) #x1f)\n(in x)"), ParseError);
    CHECK_THROWS_AS(parse_term("(let x int 1)"), ParseError);
    CHECK_THROWS_AS(parse_term("(let x int 1)\n(let y bool (add x x))\n(in y)"), ParseError);
}

TEST_CASE("print normalizes and round-trips") {
    const std::string messy = "; comment\n(let  x int (unknown)) (let zero int 0)\n(let c1 bool (lt x zero)) (in c1)";
    const std::string norm = "(let x int (unknown))\n(let zero int 0)\n(let c1 bool (lt x zero))\n(in c1)\n";
    CHECK(normalize(messy) == norm);
    CHECK(normalize(norm) == norm);
    for (const char* f : {"fig1.laf", "fig2.laf", "fig10.laf"}) {
        CAPTURE(f);
        Term t = parse_term(slurp(f));
        const std::string p = print_term(t);
        CHECK(parse_term(p) == t);
        CHECK(normalize(p) == p);
    }
}

TEST_CASE("bitvector literals") {
    Term t = parse_term("(let a (bv 8) #xff)\n(let b (bv 3) #b101)\n(let c (bv 4) 9)\n(let d (bv 11) (concat a b))\n(in d)");
    CHECK(print_term(t).find("(let c (bv 4) #x9)") != std::string::npos);
    CHECK(print_term(t).find("(let b (bv 3) #b101)") != std::string::npos);
    auto vals = result_values(t, EnumBudget{});
    REQUIRE(vals.size() == 1);
    CHECK(vals.begin()->bits() == 0x7fd);
}
