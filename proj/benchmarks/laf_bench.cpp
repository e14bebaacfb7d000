// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "laf/analysis.hpp"
#include "laf/constraint.hpp"
#include "laf/export.hpp"
#include "laf/nonrel.hpp"
#include "laf/relational.hpp"
#include "laf/semantics.hpp"
#include "laf/termgen.hpp"

using namespace laf;

namespace {

std::string fixture(const std::string& name) { return std::string(LAF_FIXTURE_DIR) + "/" + name; }

// vars unknowns, then a nondet between two k-tuples.
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
    return b.term(b.nondet("n", a, c));
}

Term chain(std::size_t n) {
    Builder b;
    Var x = b.unknown("x", Sort::integer());
    for (std::size_t i = 0; i < n; ++i) {
        x = b.binary("y" + std::to_string(i), OpKind::Add, x, x);
    }
    return b.term(x);
}

}  // namespace

// Cost of the final nondet only; should not depend on the variable count.
static void BM_TargetedJoin(benchmark::State& state) {
    const Term t = wide_nondet(static_cast<std::size_t>(state.range(0)), 8);
    NonRelDomain dom;
    NonRelEnv prefix;
    for (std::size_t i = 0; i + 1 < t.ctx.size(); ++i) {
        dom.eval_into(Context(std::vector<Def>{t.ctx[i]}), prefix);
    }
    const Context last(std::vector<Def>{t.ctx[t.ctx.size() - 1]});
    std::uint64_t ops = 0;
    NonRelEnv env;
    for (auto _ : state) {
        // Copying and freeing the environment is O(vars); keep it untimed.
        state.PauseTiming();
        env = prefix;
        state.ResumeTiming();
        const auto before = env.op_counter;
        dom.eval_into(last, env);
        ops = env.op_counter - before;
        benchmark::DoNotOptimize(env);
    }
    state.counters["joins"] = static_cast<double>(ops);
}
BENCHMARK(BM_TargetedJoin)->Arg(100)->Arg(10000);

static void BM_IntervalChain(benchmark::State& state) {
    const Term t = chain(static_cast<std::size_t>(state.range(0)));
    NonRelDomain dom;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dom.analyze(t));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_IntervalChain)->RangeMultiplier(10)->Range(100, 10000)->Complexity(benchmark::oN);

static void BM_ConstraintAbs(benchmark::State& state) {
    const Program p = load_program(fixture("fig1.while"), {});
    ConstraintDomain dom;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dom.analyze(p.term));
    }
}
BENCHMARK(BM_ConstraintAbs);

static void BM_RelationalLoop(benchmark::State& state) {
    const Program p = load_program(fixture("fig10.while"), {});
    RelationalDomain dom;
    for (auto _ : state) {
        benchmark::DoNotOptimize(dom.analyze(p.term));
    }
}
BENCHMARK(BM_RelationalLoop);

static void BM_Collect(benchmark::State& state) {
    std::vector<Term> terms;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        TermGenConfig cfg;
        cfg.seed = seed;
        terms.push_back(gen_term(cfg));
    }
    EnumBudget budget;
    budget.int_lo = -4;
    budget.int_hi = 4;
    budget.max_mu_iters = 8;
    budget.mu_cap = EnumBudget::MuCap::Truncate;
    for (auto _ : state) {
        for (const auto& t : terms) {
            benchmark::DoNotOptimize(collect(t, budget));
        }
    }
}
BENCHMARK(BM_Collect);

static void BM_ToFo(benchmark::State& state) {
    const Term t = chain(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(to_fo(t));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ToFo)->RangeMultiplier(10)->Range(100, 10000)->Complexity(benchmark::oN);

BENCHMARK_MAIN();
