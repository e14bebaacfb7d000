// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include "laf/nonrel.hpp"
#include "laf/termgen.hpp"
#include "laf/text.hpp"

using namespace laf;

namespace {

const NonRelEnv& as_env(const std::shared_ptr<const AbsState>& s) { return dynamic_cast<const NonRelEnv&>(*s); }

std::string describe_named(const NonRelDomain& dom, const Term& t, const AbsState& s, const std::string& name) {
    auto v = find_var(t, name);
    REQUIRE(v.has_value());
    return dom.describe(s, *v);
}

// Term with `vars` unrelated unknowns, then a nondet between two k-tuples.
Term wide_nondet(std::size_t vars, std::size_t k) {
    Builder b;
    std::vector<Var> xs;
    for (std::size_t i = 0; i < vars; ++i) {
        xs.push_back(b.unknown("x" + std::to_string(i), Sort::integer()));
    }
    std::vector<Var> l(xs.begin(), xs.begin() + static_cast<long>(k));
    std::vector<Var> r(xs.end() - static_cast<long>(k), xs.end());
    Var a = b.op("ta", TheoryOp::simple(OpKind::Mk), l);
    Var c = b.op("tb", TheoryOp::simple(OpKind::Mk), r);
    Var n = b.nondet("n", a, c);
    return b.term(n);
}

std::uint64_t cost_of_last(const Term& t) {
    NonRelDomain dom;
    NonRelEnv env;
    for (std::size_t i = 0; i + 1 < t.ctx.size(); ++i) {
        dom.eval_into(Context(std::vector<Def>{t.ctx[i]}), env);
    }
    const std::uint64_t before = env.op_counter;
    dom.eval_into(Context(std::vector<Def>{t.ctx[t.ctx.size() - 1]}), env);
    return env.op_counter - before;
}

}  // namespace

TEST_CASE("intervals lose the symbolic zero of v - v") {
    Term t = parse_term(
        "(let two int 2)\n(let seven int 7)\n(let v int (nondet two seven))\n(let d int (sub v v))\n(in d)");
    NonRelDomain dom;
    auto s = dom.analyze(t);
    CHECK(describe_named(dom, t, *s, "v") == "[2;7]");
    CHECK(describe_named(dom, t, *s, "d") == "[-5;5]");
}

TEST_CASE("counting loop widens to an unbounded interval") {
    Term t = parse_term(
        "(let zero int 0)\n"
        "(let r int (mu (x)\n"
        "  (let one int 1)\n"
        "  (let y int (add x one))\n"
        "  y zero))\n"
        "(in r)");
    NonRelDomain dom;
    auto s = dom.analyze(t);
    CHECK(describe_named(dom, t, *s, "r") == "[0;+oo]");
}

TEST_CASE("widening delay keeps bounded loops precise") {
    Term t = parse_term(
        "(let zero int 0)\n"
        "(let r int (mu (x)\n"
        "  (let one int 1)\n"
        "  (let y int (add x one))\n"
        "  (let three int 3)\n"
        "  (let c bool (le y three))\n"
        "  (let e int (assume c y))\n"
        "  e zero))\n"
        "(in r)");
    NonRelConfig cfg;
    cfg.widen_delay = 5;
    NonRelDomain dom(cfg);
    auto s = dom.analyze(t);
    // assume is discarded, so the count still diverges; the delay only
    // postpones the jump.
    CHECK(describe_named(dom, t, *s, "r") == "[0;+oo]");
    NonRelDomain plain;
    CHECK(describe_named(plain, t, *plain.analyze(t), "r") == "[0;+oo]");
}

TEST_CASE("unknown is top") {
    Term t = parse_term("(let x int (unknown))\n(in x)");
    NonRelDomain dom;
    auto s = dom.analyze(t);
    CHECK(describe_named(dom, t, *s, "x") == "[-oo;+oo]");
}

TEST_CASE("constant mode") {
    Term t = parse_term("(let a int 3)\n(let b int 4)\n(let c int (mul a b))\n(let d int (nondet a b))\n(in c)");
    NonRelConfig cfg;
    cfg.lattice.int_mode = IntMode::Constant;
    NonRelDomain dom(cfg);
    auto s = dom.analyze(t);
    CHECK(dom.name() == "constants");
    CHECK(describe_named(dom, t, *s, "c") == "12");
    CHECK(describe_named(dom, t, *s, "d") == "top");
}

TEST_CASE("per-definition operation counts") {
    Term t = parse_term(
        "(let x int (unknown))\n(let y int (add x x))\n(let c bool (lt x y))\n(let z int (assume c y))\n(in z)");
    NonRelDomain dom;
    NonRelEnv env;
    std::vector<std::uint64_t> costs;
    for (const auto& d : t.ctx) {
        costs.push_back(dom.count_ops_for(d, env));
        dom.eval_into(Context(std::vector<Def>{d}), env);
    }
    CHECK(costs == std::vector<std::uint64_t>{0, 1, 1, 0});
}

TEST_CASE("tuple nondet costs one join per component regardless of width") {
    for (std::size_t k : {1U, 3U, 7U}) {
        CAPTURE(k);
        CHECK(cost_of_last(wide_nondet(100, k)) == k);
        CHECK(cost_of_last(wide_nondet(10000, k)) == k);
    }
}

TEST_CASE("straight-line cost is linear") {
    auto chain = [](std::size_t n) {
        Builder b;
        Var x = b.unknown("x", Sort::integer());
        for (std::size_t i = 0; i < n; ++i) {
            x = b.binary("y" + std::to_string(i), OpKind::Add, x, x);
        }
        return b.term(x);
    };
    NonRelDomain dom;
    for (std::size_t n : {10U, 100U, 1000U}) {
        CHECK(as_env(dom.analyze(chain(n))).op_counter == n);
    }
}

TEST_CASE("loop result is a post-fixpoint") {
    NonRelDomain dom;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        TermGenConfig cfg;
        cfg.seed = seed;
        cfg.set_weight(GenKind::Mu, 4);
        Term t = gen_term(cfg);
        auto s = dom.analyze(t);
        const auto& env = as_env(s);
        for (const auto& d : t.ctx) {
            if (const auto* mu = std::get_if<MuRhs>(&d.rhs)) {
                const AbsValue& L = *env.lookup(d.bound);
                // Re-run the body once from L.
                NonRelEnv probe = env;
                probe.update(mu->loopvar, L);
                dom.eval_into(mu->body, probe);
                CAPTURE(seed);
                CHECK(leq(join(*probe.lookup(mu->exit), *env.lookup(mu->init)), L));
            }
        }
    }
}

TEST_CASE("soundness on random terms") {
    EnumBudget budget;
    budget.int_lo = -4;
    budget.int_hi = 4;
    budget.max_mu_iters = 8;
    budget.mu_cap = EnumBudget::MuCap::Truncate;
    for (IntMode mode : {IntMode::Interval, IntMode::Constant}) {
        NonRelConfig nc;
        nc.lattice.int_mode = mode;
        NonRelDomain dom(nc);
        std::size_t ok = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            TermGenConfig cfg;
            cfg.seed = seed;
            cfg.set_weight(GenKind::BitVec, seed % 3 == 0 ? 2 : 0);
            Term t = gen_term(cfg);
            auto v = soundness_check(dom, t, budget);
            CAPTURE(seed);
            CAPTURE(v.message);
            CHECK_FALSE(v.counterexample());
            ok += v.ok() ? 1 : 0;
        }
        CHECK(ok >= 450);
    }
}
