// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "laf/constraint.hpp"
#include "laf/termgen.hpp"
#include "laf/text.hpp"

using namespace laf;

namespace {

std::string slurp(const std::string& name) {
    std::ifstream in(std::string(LAF_FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const ConstraintState& as_state(const std::shared_ptr<const AbsState>& s) {
    return dynamic_cast<const ConstraintState&>(*s);
}

std::set<std::string> entries_of(const ConstraintState& st, const Term& t, const std::string& name) {
    auto v = find_var(t, name);
    REQUIRE(v.has_value());
    std::set<std::string> out;
    for (const auto& e : st.entries(st.gv[v->id()]->id())) {
        out.insert(st.cond_str(e.cond) + " ⊩ " + e.val.str());
    }
    return out;
}

EnumBudget small_budget() {
    EnumBudget b;
    b.int_lo = -4;
    b.int_hi = 4;
    b.max_mu_iters = 8;
    b.mu_cap = EnumBudget::MuCap::Truncate;
    return b;
}

}  // namespace

TEST_CASE("absolute value example") {
    Term t = parse_term(slurp("fig1.laf"));
    ConstraintDomain dom;
    auto s = dom.analyze(t);
    const auto& st = as_state(s);
    CHECK(entries_of(st, t, "x") == std::set<std::string>{"true ⊩ [-oo;+oo]", "c1 ⊩ [-oo;-1]", "¬c1 ⊩ [0;+oo]",
                                                         "c1∧c2 ⊩ [-8;-1]", "¬c1∧c2 ⊩ [0;8]"});
    CHECK(entries_of(st, t, "abs") == std::set<std::string>{"true ⊩ [0;+oo]", "c2 ⊩ [0;8]"});
    CHECK(entries_of(st, t, "xdiv") == std::set<std::string>{"c2 ⊩ [0;0]"});
    CHECK(entries_of(st, t, "c4") == std::set<std::string>{"c2 ⊩ {true}"});
    CHECK(entries_of(st, t, "c1") == std::set<std::string>{"true ⊩ {true;false}", "c1 ⊩ {true}", "¬c1 ⊩ {false}"});
    CHECK(dom.query(*s, t.result) == Truth::Proved);
    CHECK(st.str().find("xdiv : c2 ⊩ [0;0]\n") != std::string::npos);

    SUBCASE("the store rejects xdiv = 1 when c2 holds") {
        auto var = [&](const char* n) { return find_var(t, n)->id(); };
        Env env(t.var_count());
        auto set_int = [&](const char* n, int v) { env[var(n)] = Value::integer(v); };
        set_int("x", 9);
        set_int("zero", 0);
        env[var("c1")] = Value::boolean(false);
        set_int("nx", -9);
        env[var("t1")] = Value::tuple({Value::integer(-9), Value::integer(9)});
        env[var("t1p")] = Value::bottom();
        env[var("t2")] = Value::tuple({Value::integer(9), Value::integer(-9)});
        env[var("nc1")] = Value::boolean(true);
        env[var("t2p")] = env[var("t2")];
        env[var("t3")] = env[var("t2")];
        set_int("abs", 9);
        set_int("nabs", -9);
        set_int("mnabs", 9);
        env[var("c3")] = Value::boolean(true);
        set_int("eight", 8);
        env[var("c2")] = Value::boolean(true);
        env[var("xa")] = Value::integer(9);
        set_int("nine", 9);
        set_int("xdiv", 1);
        env[var("c4")] = Value::boolean(false);
        CHECK(dom.gamma_contains(*s, env).kind == Membership::Kind::NotMember);
    }
}

TEST_CASE("propagation limit zero keeps only seed bindings") {
    Term t = parse_term(slurp("fig1.laf"));
    ConstraintConfig cfg;
    cfg.prop.limit = 0;
    ConstraintDomain dom(cfg);
    auto s = dom.analyze(t);
    const auto& st = as_state(s);
    CHECK(entries_of(st, t, "x") == std::set<std::string>{"true ⊩ [-oo;+oo]"});
    CHECK(entries_of(st, t, "c2") == std::set<std::string>{"true ⊩ {true;false}", "c2 ⊩ {true}"});
    CHECK(dom.query(*s, t.result) == Truth::Unknown);
}

TEST_CASE("backward only still proves the example") {
    Term t = parse_term(slurp("fig1.laf"));
    ConstraintConfig cfg;
    cfg.prop.direction = PropDirection::Backward;
    ConstraintDomain dom(cfg);
    auto s = dom.analyze(t);
    CHECK(dom.query(*s, t.result) == Truth::Proved);
    CHECK(entries_of(as_state(s), t, "nx").count("c1 ⊩ [1;+oo]") == 0);
}

TEST_CASE("an unsatisfiable assume makes its result dead") {
    Term t = parse_term(R"((let x int (unknown))
(let zero int 0)
(let c bool (eq zero zero))
(let n bool (not c))
(let d int (assume n x))
(let e bool (lt d zero))
(in e))");
    ConstraintDomain dom;
    auto s = dom.analyze(t);
    const auto& st = as_state(s);
    CHECK(st.gc[find_var(t, "d")->id()]->infeasible());
    CHECK(dom.query(*s, t.result) == Truth::Proved);
    CHECK(dom.value_of(st, *find_var(t, "d")).is_empty());
}

TEST_CASE("nondet keeps the common part of the branch conditions") {
    Term t = parse_term(R"((let x int (unknown))
(let y int (unknown))
(let zero int 0)
(let a bool (lt x zero))
(let b bool (lt y zero))
(let p int (assume a x))
(let q int (assume b p))
(let r int (assume a y))
(let m int (nondet q r))
(in m))");
    ConstraintDomain dom;
    auto s = dom.analyze(t);
    const auto& st = as_state(s);
    const auto& c = *st.gc[find_var(t, "m")->id()];
    REQUIRE(c.lits().size() == 1);
    CHECK(st.var_name(c.lits()[0].var) == "a");
    CHECK(dom.value_of(st, *find_var(t, "q")).str() == "[-oo;-1]");
}

TEST_CASE("loops reach a post-fixpoint over condition maps") {
    Term t = parse_term(R"((let zero int 0)
(let one int 1)
(let five int 5)
(let r int (mu (s)
  (let c bool (lt s five))
  (let g int (assume c s))
  (let n int (add g one))
  n zero))
(let ok bool (le r five))
(in ok))");
    ConstraintConfig cfg;
    cfg.lattice.thresholds = LatticeConfig::default_thresholds();
    cfg.lattice.thresholds.push_back(5);
    ConstraintDomain dom(cfg);
    auto s = dom.analyze(t);
    CHECK(dom.value_of(as_state(s), *find_var(t, "r")).str() == "[0;5]");
    CHECK(dom.query(*s, t.result) == Truth::Proved);
}

TEST_CASE("soundness on random terms") {
    const EnumBudget budget = small_budget();
    for (auto dir : {PropDirection::Both, PropDirection::Backward}) {
        ConstraintConfig cfg;
        cfg.prop.direction = dir;
        ConstraintDomain dom(cfg);
        std::size_t ok = 0;
        for (std::uint64_t seed = 0; seed < 500; ++seed) {
            TermGenConfig gc;
            gc.seed = seed;
            gc.set_weight(GenKind::BitVec, seed % 3 == 0 ? 2 : 0);
            Term t = gen_term(gc);
            auto v = soundness_check(dom, t, budget);
            CAPTURE(seed);
            CAPTURE(v.message);
            CHECK_FALSE(v.counterexample());
            ok += v.ok() ? 1 : 0;
        }
        CHECK(ok >= 450);
    }
}

TEST_CASE("raising the propagation limit never loses precision") {
    auto check_term = [](const Term& t) {
        std::optional<std::shared_ptr<const AbsState>> prev;
        std::optional<ConstraintDomain> prev_dom;
        for (std::optional<unsigned> limit : {std::optional<unsigned>(0), std::optional<unsigned>(1),
                                              std::optional<unsigned>(3), std::optional<unsigned>()}) {
            ConstraintConfig cfg;
            cfg.prop.limit = limit;
            ConstraintDomain dom(cfg);
            auto s = dom.analyze(t);
            if (prev) {
                for_each_binder(t.ctx, [&](const Var& v) {
                    const auto& st = as_state(s);
                    if (v.id() >= st.gv.size() || !st.gv[v.id()]) {
                        return;
                    }
                    AbsValue now = dom.value_of(st, v);
                    AbsValue before = prev_dom->value_of(as_state(*prev), v);
                    CAPTURE(v.name());
                    CHECK(leq(now, before));
                });
            }
            prev = s;
            prev_dom.emplace(cfg);
        }
    };
    check_term(parse_term(slurp("fig1.laf")));
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        TermGenConfig gc;
        gc.seed = seed;
        CAPTURE(seed);
        check_term(gen_term(gc));
    }
}
