// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "laf/constraint.hpp"
#include "laf/nonrel.hpp"
#include "laf/relational.hpp"
#include "laf/semantics.hpp"
#include "laf/text.hpp"
#include "laf/while.hpp"
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

// Small random programs over a, b, c. Loops count a variable up to a bound
// most of the time, so many of them terminate within the budget.
class ProgGen {
  public:
    explicit ProgGen(std::uint64_t seed) : rng_(seed) {}

    std::string program() {
        std::string out;
        const int n = 1 + pick(4);
        for (int i = 0; i < n; ++i) {
            out += stmt(2);
        }
        return out;
    }

  private:
    std::mt19937_64 rng_;
    int nondets_ = 0;

    int pick(int n) { return static_cast<int>(rng_() % static_cast<std::uint64_t>(n)); }
    std::string var() { return std::string(1, static_cast<char>('a' + pick(3))); }

    std::string atom() {
        const int k = pick(6);
        if (k == 0 && nondets_ < 1) {
            ++nondets_;
            return "nondet";
        }
        if (k <= 2) {
            return std::to_string(pick(5) - 2);
        }
        return var();
    }

    std::string expr(int depth) {
        if (depth == 0 || pick(3) == 0) {
            return atom();
        }
        static const char* ops[] = {"+", "-", "*", "/"};
        if (pick(6) == 0) {
            return "-" + expr(depth - 1);
        }
        return "(" + expr(depth - 1) + " " + ops[pick(4)] + " " + expr(depth - 1) + ")";
    }

    std::string cond() {
        static const char* ops[] = {"<", "<=", "==", "!=", ">", ">="};
        std::string c = expr(1) + " " + ops[pick(6)] + " " + expr(1);
        switch (pick(5)) {
        case 0: return "!(" + c + ")";
        case 1: return c + " && " + var() + " < 2";
        case 2: return var();
        default: return c;
        }
    }

    std::string stmt(int depth) {
        const int k = depth == 0 ? 0 : pick(5);
        if (k <= 1) {
            return var() + " := " + expr(2) + ";\n";
        }
        if (k == 2) {
            std::string s = "if (" + cond() + ") {\n" + stmt(depth - 1) + "}";
            if (pick(2) == 0) {
                s += " else {\n" + stmt(depth - 1) + "}";
            }
            return s + "\n";
        }
        if (k == 3) {
            const std::string v = var();
            return "while (" + v + " < " + std::to_string(pick(3)) + ") {\n" + v + " := " + v + " + 1;\n" +
                   stmt(depth - 1) + "}\n";
        }
        return "assert(" + cond() + ");\n";
    }
};

std::set<std::vector<Integer>> live_results(const Term& t, const EnumBudget& b) {
    std::set<std::vector<Integer>> out;
    for (const auto& v : result_values(t, b)) {
        if (v.is_bottom()) {
            continue;
        }
        std::vector<Integer> row;
        for (const auto& e : v.elements()) {
            row.push_back(e.as_int());
        }
        out.insert(std::move(row));
    }
    return out;
}

const Def* top_def(const Term& t, const Var& v) {
    for (const auto& d : t.ctx.defs()) {
        if (d.bound == v) {
            return &d;
        }
    }
    return nullptr;
}

EnumBudget budget_for(const WhileRunConfig& cfg) {
    EnumBudget b;
    b.int_lo = cfg.lo;
    b.int_hi = cfg.hi;
    b.max_mu_iters = cfg.max_iters;
    b.mu_cap = EnumBudget::MuCap::Truncate;
    b.max_env_count = 2000000;
    return b;
}

}  // namespace

TEST_CASE("parsing") {
    SUBCASE("loop example has four top-level statements") {
        WProgram p = parse_while(slurp("fig10.while"));
        CHECK(p.stmts.size() == 4);
        CHECK(p.vars == std::vector<std::string>{"x", "y", "n"});
    }
    SUBCASE("empty file") {
        WProgram p = parse_while("");
        CHECK(p.stmts.empty());
        CHECK(p.vars.empty());
        WhileTranslation t = translate_while(p);
        CHECK(check_wf(t.term).empty());
    }
    SUBCASE("missing expression") {
        try {
            parse_while("x := ;");
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
            CHECK(e.column() == 6);
        }
    }
    SUBCASE("type errors") {
        CHECK_THROWS_AS(parse_while("x := 1 < 2;"), ParseError);
        CHECK_THROWS_AS(parse_while("x := (1 < 2) + 3;"), ParseError);
        CHECK_THROWS_AS(parse_while("while (x) y := 1;"), ParseError);
    }
    SUBCASE("integers in conditions are compared with zero") {
        WProgram p = parse_while("if (x) { y := 1; } else if (!x) { y := 2; }");
        const auto& c = *p.stmts[0]->expr;
        CHECK(expr_str(c) == "(x != 0)");
        REQUIRE(p.stmts[0]->else_s);
        CHECK(p.stmts[0]->else_s->kind == WStmt::Kind::If);
    }
    SUBCASE("assertion text") {
        WProgram p = parse_while("assert(x == y);  // done");
        CHECK(p.stmts[0]->text == "x == y");
    }
}

TEST_CASE("translation follows the interpreter") {
    WhileRunConfig cfg;
    cfg.max_iters = 3;
    const EnumBudget budget = budget_for(cfg);
    std::size_t nonempty = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const std::string src = ProgGen(seed).program();
        CAPTURE(seed);
        CAPTURE(src);
        WProgram p = parse_while(src);
        WhileRunResult run = run_while(p, cfg);
        WhileTranslation t = translate_while(p);
        REQUIRE(check_wf(t.term).empty());
        const auto raw = live_results(t.term, budget);
        CHECK(raw == run.finals);
        WhileTranslation s = simplify_translation(t);
        REQUIRE(check_wf(s.term).empty());
        CHECK(live_results(s.term, budget) == run.finals);
        CHECK(s.asserts.size() == t.asserts.size());
        nonempty += run.finals.empty() ? 0 : 1;
    }
    CHECK(nonempty >= 80);
}

TEST_CASE("unrolling keeps the result set") {
    WhileRunConfig cfg;
    cfg.max_iters = 6;
    const std::string src = "i := 0; while (i < 3) { i := i + 1; s := s + i; }";
    WProgram p = parse_while(src);
    auto base = run_while(p, cfg).finals;
    for (unsigned n : {1U, 2U}) {
        WProgram u = unroll_loops(p, n);
        CHECK(run_while(u, cfg).finals == base);
        CHECK(live_results(translate_while(u).term, budget_for(cfg)) == base);
    }
}

TEST_CASE("emitted terms parse back") {
    WProgram p = parse_while(slurp("fig1.while"));
    for (bool simp : {false, true}) {
        WhileTranslation t = translate_while(p);
        if (simp) {
            t = simplify_translation(t);
        }
        Term back = parse_term(print_term(t.term));
        CHECK(count_defs(back.ctx) == count_defs(t.term.ctx));
    }
}

TEST_CASE("loop example through the frontend") {
    WhileTranslation t = simplify_translation(translate_while(parse_while(slurp("fig10.while"))));
    REQUIRE(t.asserts.size() == 1);
    RelationalDomain rel;
    CHECK(rel.query(*rel.analyze(t.term), t.asserts[0].var) == Truth::Proved);
    NonRelDomain itv;
    CHECK(itv.query(*itv.analyze(t.term), t.asserts[0].var) == Truth::Unknown);
}

TEST_CASE("absolute value example through the frontend") {
    WhileTranslation t = simplify_translation(translate_while(parse_while(slurp("fig1.while"))));
    REQUIRE(t.asserts.size() == 2);
    ConstraintDomain dom;
    auto s = dom.analyze(t.term);
    const auto& st = dynamic_cast<const ConstraintState&>(*s);
    INFO(st.str());
    INFO(print_term(t.term));
    CHECK(dom.query(*s, t.asserts[1].var) == Truth::Proved);
    auto entries = [&](const Var& v) {
        std::set<std::string> out;
        for (const auto& e : st.entries(st.gv[v.id()]->id())) {
            out.insert(st.cond_str(e.cond) + " ⊩ " + e.val.str());
        }
        return out;
    };
    CHECK(entries(*find_var(t.term, "x")) ==
          std::set<std::string>{"true ⊩ [-oo;+oo]", "c1 ⊩ [-oo;-1]", "¬c1 ⊩ [0;+oo]", "c1∧c2 ⊩ [-8;-1]",
                                "¬c1∧c2 ⊩ [0;8]"});
    CHECK(entries(*find_var(t.term, "xdiv")) == std::set<std::string>{"c2 ⊩ [0;0]"});
    const auto* eq = std::get_if<OpRhs>(&top_def(t.term, t.asserts[0].var)->rhs);
    REQUIRE(eq != nullptr);
    CHECK(entries(eq->args[0]) == std::set<std::string>{"true ⊩ [0;+oo]", "c2 ⊩ [0;8]"});
    CHECK(entries(t.asserts[1].var) == std::set<std::string>{"c2 ⊩ {true}"});
}
