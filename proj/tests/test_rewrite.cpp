// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "laf/rewrite.hpp"
#include "laf/termgen.hpp"
#include "laf/text.hpp"
#include "laf/wf.hpp"

using namespace laf;

namespace {

Term load(const std::string& name) {
    std::ifstream in(std::string(LAF_FIXTURE_DIR) + "/" + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_term(ss.str());
}

const Def& def_of(const Term& t, const Var& v) {
    for (const auto& d : t.ctx) {
        if (d.bound == v) {
            return d;
        }
    }
    FAIL("no definition for " << v.name());
    return t.ctx[0];
}

std::string rhs_of(const Term& t, const Var& v) {
    // Print the single definition through a one-line term.
    const std::string all = print_term(t);
    std::istringstream in(all);
    std::string line;
    const std::string key = "(let " + v.name() + " ";
    while (std::getline(in, line)) {
        if (line.starts_with(key)) {
            return line;
        }
    }
    return "";
}

const RewriteRule& rule_named(const std::vector<RewriteRule>& rs, const std::string& n) {
    for (const auto& r : rs) {
        if (r.name == n) {
            return r;
        }
    }
    throw Error("no rule " + n);
}

Env env_of(const Term& t, std::initializer_list<std::pair<const char*, Value>> vals) {
    Env e(t.var_count());
    for (const auto& [n, v] : vals) {
        e[find_var(t, n)->id()] = v;
    }
    return e;
}

Term zero_times_dead() {
    return parse_term(
        "(let u int (unknown))\n"
        "(let three int 3)\n"
        "(let e bool (eq u three))\n"
        "(let ne bool (not e))\n"
        "(let v int (assume ne u))\n"
        "(let zero int 0)\n"
        "(let s int (mul zero v))\n"
        "(in s)");
}

}  // namespace

TEST_CASE("nondet of a variable with itself becomes an alias") {
    Term t = parse_term("(let x int (unknown))\n(let y int (nondet x x))\n(in y)");
    RewriteDomain dom;
    auto st = std::dynamic_pointer_cast<const RewriteState>(dom.analyze(t));
    CHECK(st->out.size() == 1);
    CHECK(*st->image(*find_var(t, "y")) == *st->image(*find_var(t, "x")));
}

TEST_CASE("byte-wise copy rewrites the assertion to true") {
    Term t = load("fig2.laf");
    RewriteDomain dom;
    auto st = dom.analyze(t);
    CHECK(dom.query(*st, t.result) == Truth::Proved);
    Term out = dom.rewrite(t);
    CHECK(check_wf(out).empty());
    CHECK(rhs_of(out, out.result) == "(let b bool true)");
    // Intermediate copies collapse onto X.
    auto rs = std::dynamic_pointer_cast<const RewriteState>(st);
    const Var X = *rs->image(*find_var(t, "X"));
    for (const char* n : {"Xp", "Xpp", "Xppp", "t0"}) {
        CAPTURE(n);
        CHECK(*rs->image(*find_var(t, n)) == X);
    }
}

TEST_CASE("identity rewriting keeps the term") {
    Term t = parse_term("(let x int (unknown))\n(let two int 2)\n(let y int (mul x two))\n(in y)");
    RewriteDomain dom;
    Term out = dom.rewrite(t);
    CHECK(print_term(out) == print_term(t));
}

TEST_CASE("constant folding") {
    Term t = parse_term("(let x int (unknown))\n(let two int 2)\n(let a int (add two x))\n(let three int 3)\n"
                        "(let b int (add a three))\n(in b)");
    RewriteDomain dom;
    Term out = dom.rewrite(t);
    const auto& d = def_of(out, out.result);
    const auto& o = std::get<OpRhs>(d.rhs);
    CHECK(o.op.kind == OpKind::Add);
    CHECK(o.args[0].name() == "x");
    CHECK(print_literal(std::get<OpRhs>(def_of(out, o.args[1]).rhs).op) == "5");
}

TEST_CASE("equality with itself needs a live operand") {
    Term live = parse_term("(let x int (unknown))\n(let c bool (eq x x))\n(in c)");
    Term dead = parse_term("(let x int (unknown))\n(let z int 0)\n(let d int (div x z))\n(let c bool (eq d d))\n"
                           "(in c)");
    RewriteDomain dom;
    CHECK(dom.query(*dom.analyze(live), live.result) == Truth::Proved);
    CHECK(dom.query(*dom.analyze(dead), dead.result) == Truth::Unknown);
}

TEST_CASE("projection through a tuple respects liveness") {
    Term ok = parse_term("(let x int (unknown))\n(let one int 1)\n(let y int (add x one))\n"
                         "(let t (tuple int int) (mk x y))\n(let g int (get.0 t))\n(in g)");
    Term guarded = parse_term("(let x int (unknown))\n(let z int 0)\n(let y int (div x z))\n"
                              "(let t (tuple int int) (mk x y))\n(let g int (get.0 t))\n(in g)");
    RewriteDomain dom;
    auto a = std::dynamic_pointer_cast<const RewriteState>(dom.analyze(ok));
    auto b = std::dynamic_pointer_cast<const RewriteState>(dom.analyze(guarded));
    CHECK(*a->image(ok.result) == *a->image(*find_var(ok, "x")));
    CHECK_FALSE(*b->image(guarded.result) == *b->image(*find_var(guarded, "x")));
}

TEST_CASE("zero times a dead value") {
    Term t = zero_times_dead();
    const Env e = env_of(t, {{"u", Value::integer(3)},
                             {"three", Value::integer(3)},
                             {"e", Value::boolean(true)},
                             {"ne", Value::boolean(false)},
                             {"v", Value::bottom()},
                             {"zero", Value::integer(0)},
                             {"s", Value::bottom()}});
    RewriteConfig exact;
    exact.rules = default_rulesets().all();
    exact.gamma = GammaMode::Exact;
    RewriteConfig over = exact;
    over.gamma = GammaMode::OverApprox;
    RewriteDomain de(exact);
    RewriteDomain dover(over);
    CHECK(de.gamma_contains(*de.analyze(t), e).kind == Membership::Kind::NotMember);
    CHECK(dover.gamma_contains(*dover.analyze(t), e).kind == Membership::Kind::Member);
    auto v = soundness_check(de, t, EnumBudget{});
    CHECK(v.counterexample());
    REQUIRE(v.env.has_value());
    CHECK(*v.env == e);
    CHECK(soundness_check(dover, t, EnumBudget{}).ok());
}

TEST_CASE("x/x under the over-approximating gamma") {
    Term t = parse_term("(let x int (unknown))\n(let q int (div x x))\n(in q)");
    RewriteConfig cfg;
    cfg.rules = default_rulesets().all();
    cfg.gamma = GammaMode::OverApprox;
    RewriteDomain dom(cfg);
    auto st = dom.analyze(t);
    for (const auto& g : collect(t, EnumBudget{})) {
        CHECK(dom.gamma_contains(*st, g).kind == Membership::Kind::Member);
    }
}

TEST_CASE("shipped rules pass the validity check") {
    const RuleSet rs = default_rulesets();
    CHECK(rs.exact.size() == 11);
    CHECK(rs.approx.size() == 4);
    for (const auto& r : rs.all()) {
        CAPTURE(r.name);
        auto c = check_rule(r);
        CAPTURE(c.counterexample);
        CHECK(c.valid);
        for (const auto& s : r.schemas) {
            CHECK(s.rhs.size() <= s.lhs.size());
        }
    }
}

TEST_CASE("over-approximating rules are not exact") {
    for (const auto& r : default_rulesets().approx) {
        RewriteRule as_exact = r;
        as_exact.kind = RuleKind::Exact;
        CAPTURE(r.name);
        CHECK_FALSE(check_rule(as_exact).valid);
    }
    RewriteRule eq = rule_named(default_rulesets().exact, "eq-same");
    eq.admissible = nullptr;
    CHECK_FALSE(check_rule(eq).valid);
    RewriteRule getmk = rule_named(default_rulesets().exact, "get-mk");
    getmk.admissible = nullptr;
    CHECK_FALSE(check_rule(getmk).valid);
}

TEST_CASE("inverse comparison rewrite is over-approximating") {
    auto rs = aggressive_rules();
    REQUIRE(rs.size() == 1);
    CHECK(check_rule(rs[0]).valid);
    RewriteRule as_exact = rs[0];
    as_exact.kind = RuleKind::Exact;
    CHECK_FALSE(check_rule(as_exact).valid);
}

TEST_CASE("invalid user rule is caught") {
    auto rs = parse_rule_file("; bogus\n(sub ?x ?y) => 0 approx\n(add ?x 0) => ?x exact\n");
    REQUIRE(rs.size() == 2);
    CHECK(rs[0].kind == RuleKind::Approx);
    CHECK(rs[1].kind == RuleKind::Exact);
    CHECK_FALSE(check_rule(rs[0]).valid);
    CHECK(check_rule(rs[1]).valid);
    CHECK_THROWS_AS(parse_rule_file("(add ?x 0) => ?y\n"), Error);
    CHECK_THROWS_AS(parse_rule_file("(add ?x 0)\n"), Error);
}

TEST_CASE("user rules apply through definitions") {
    auto rs = parse_rule_file("(add ?x 0) => ?x exact\n(neg (neg ?x)) => ?x exact\n");
    RewriteConfig cfg;
    cfg.rules = rs;
    RewriteDomain dom(cfg);
    Term t = parse_term("(let x int (unknown))\n(let a int (neg x))\n(let b int (neg a))\n(let z int 0)\n"
                        "(let c int (add b z))\n(in c)");
    auto st = std::dynamic_pointer_cast<const RewriteState>(dom.analyze(t));
    CHECK(*st->image(t.result) == *st->image(*find_var(t, "x")));
}

TEST_CASE("rewritten loops stay well formed") {
    RewriteConfig cfg;
    cfg.rules = default_rulesets().all();
    RewriteDomain dom(cfg);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        TermGenConfig g;
        g.seed = seed;
        g.set_weight(GenKind::Mu, 4);
        g.set_weight(GenKind::BitVec, 2);
        Term out = dom.rewrite(gen_term(g));
        CAPTURE(seed);
        CHECK(check_wf(out).empty());
    }
}

TEST_CASE("soundness on random terms") {
    EnumBudget budget;
    budget.int_lo = -4;
    budget.int_hi = 4;
    budget.max_mu_iters = 8;
    budget.mu_cap = EnumBudget::MuCap::Truncate;
    RewriteConfig exact;
    exact.budget = budget;
    RewriteConfig over;
    over.rules = default_rulesets().all();
    over.gamma = GammaMode::OverApprox;
    over.budget = budget;
    for (const auto& cfg : {exact, over}) {
        RewriteDomain dom(cfg);
        std::size_t ok = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            TermGenConfig g;
            g.seed = seed;
            g.set_weight(GenKind::BitVec, seed % 3 == 0 ? 2 : 0);
            Term t = gen_term(g);
            auto v = soundness_check(dom, t, budget);
            CAPTURE(seed);
            CAPTURE(v.message);
            CHECK_FALSE(v.counterexample());
            ok += v.ok() ? 1 : 0;
        }
        CHECK(ok >= 450);
    }
}
