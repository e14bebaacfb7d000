// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/semantics.hpp"

#include <deque>
#include <functional>

namespace laf {

void EnumBudget::validate() const {
    if (int_lo > int_hi) {
        throw Error("integer window is empty");
    }
    if (max_mu_iters == 0 || max_env_count == 0) {
        throw Error("budget bounds must be positive");
    }
}

std::vector<Value> enumerate_sort(const Sort& sort, const EnumBudget& budget) {
    std::vector<Value> out;
    switch (sort.kind()) {
    case Sort::Kind::Bool: return {Value::boolean(false), Value::boolean(true)};
    case Sort::Kind::Int:
        for (Integer z = budget.int_lo; z <= budget.int_hi; ++z) {
            out.push_back(Value::integer(z));
        }
        return out;
    case Sort::Kind::BitVec: {
        if (sort.width() <= 8) {
            for (unsigned b = 0; b < (1U << sort.width()); ++b) {
                out.push_back(Value::bitvec(sort.width(), b));
            }
            return out;
        }
        std::set<Value> seen;
        for (Integer z = budget.int_lo; z <= budget.int_hi; ++z) {
            seen.insert(Value::bitvec(sort.width(), z));
        }
        return {seen.begin(), seen.end()};
    }
    case Sort::Kind::Tuple: {
        std::vector<std::vector<Value>> partial{{}};
        for (const auto& e : sort.elements()) {
            auto vals = enumerate_sort(e, budget);
            std::vector<std::vector<Value>> next;
            for (const auto& p : partial) {
                for (const auto& v : vals) {
                    next.push_back(p);
                    next.back().push_back(v);
                    if (next.size() > budget.max_env_count) {
                        throw BudgetExceeded("unknown of sort " + sort.str() + " exceeds the environment budget");
                    }
                }
            }
            partial = std::move(next);
        }
        for (auto& p : partial) {
            out.push_back(Value::tuple(std::move(p)));
        }
        return out;
    }
    }
    return out;
}

namespace {

const Value& get(const Env& env, const Var& v) {
    if (v.id() >= env.size() || !env[v.id()]) {
        throw Error("variable '" + v.name() + "' has no value");
    }
    return *env[v.id()];
}

Env with(Env env, const Var& v, Value val) {
    if (env.size() <= v.id()) {
        env.resize(v.id() + 1);
    }
    env[v.id()] = std::move(val);
    return env;
}

Value eval_op(const OpRhs& r, const Env& env) {
    std::vector<Value> args;
    args.reserve(r.args.size());
    for (const auto& a : r.args) {
        args.push_back(get(env, a));
    }
    return apply_op(r.op, args);
}

Value eval_assume(const AssumeRhs& r, const Env& env) {
    const Value& c = get(env, r.cond);
    if (!c.is_bottom() && c.as_bool()) {
        return get(env, r.val);
    }
    return Value::bottom();
}

void check_size(const EnvSet& s, const EnumBudget& budget, const Def& d) {
    if (s.size() > budget.max_env_count) {
        throw BudgetExceeded("environment set exceeds " + std::to_string(budget.max_env_count) + " at '" +
                             d.bound.name() + "'");
    }
}

/// Loop fixpoint: init value plus exit values of up to max_mu_iters body
/// runs, explored breadth-first so each value is found at its least depth.
std::set<Value> mu_values(const MuRhs& mu, const Var& bound, const Env& env, const EnumBudget& budget) {
    std::set<Value> all{get(env, mu.init)};
    std::vector<Value> frontier{get(env, mu.init)};
    for (std::size_t round = 1; !frontier.empty(); ++round) {
        if (round > budget.max_mu_iters) {
            if (budget.mu_cap == EnumBudget::MuCap::Truncate) {
                break;
            }
            throw BudgetExceeded("loop '" + bound.name() + "' did not stabilise within " +
                                 std::to_string(budget.max_mu_iters) + " iterations");
        }
        std::vector<Value> next;
        for (const auto& v : frontier) {
            for (const auto& gb : collect(mu.body, with(env, mu.loopvar, v), budget)) {
                const Value& e = get(gb, mu.exit);
                if (all.insert(e).second) {
                    next.push_back(e);
                }
            }
        }
        frontier = std::move(next);
    }
    return all;
}

}  // namespace

EnvSet collect(const Context& ctx, const Env& env, const EnumBudget& budget) {
    EnvSet cur{env};
    for (const auto& d : ctx) {
        EnvSet next;
        const Var& x = d.bound;
        for (const auto& g : cur) {
            std::visit(
                [&](const auto& r) {
                    using T = std::decay_t<decltype(r)>;
                    if constexpr (std::is_same_v<T, OpRhs>) {
                        next.insert(with(g, x, eval_op(r, g)));
                    } else if constexpr (std::is_same_v<T, NondetRhs>) {
                        next.insert(with(g, x, get(g, r.a)));
                        next.insert(with(g, x, get(g, r.b)));
                    } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                        next.insert(with(g, x, eval_assume(r, g)));
                    } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                        for (auto& v : enumerate_sort(x.sort(), budget)) {
                            next.insert(with(g, x, std::move(v)));
                        }
                    } else {
                        for (const auto& v : mu_values(r, x, g, budget)) {
                            next.insert(with(g, x, v));
                        }
                    }
                },
                d.rhs);
            check_size(next, budget, d);
        }
        cur = std::move(next);
    }
    return cur;
}

EnvSet collect(const Term& term, const EnumBudget& budget) {
    budget.validate();
    return collect(term.ctx, Env(term.var_count()), budget);
}

std::set<Value> result_values(const Term& term, const EnumBudget& budget) {
    std::set<Value> out;
    for (const auto& g : collect(term, budget)) {
        out.insert(get(g, term.result));
    }
    return out;
}

namespace {

const Context& context_at(const MachineState& s, std::size_t depth) {
    const Context* ctx = &s.root;
    for (std::size_t i = 0; i < depth; ++i) {
        ctx = &std::get<MuRhs>((*ctx)[s.frames[i].pc].rhs).body;
    }
    return *ctx;
}

const MuRhs& enclosing_mu(const MachineState& s) {
    const std::size_t k = s.frames.size() - 2;
    return std::get<MuRhs>(context_at(s, k)[s.frames[k].pc].rhs);
}

MachineState loop_again(const MachineState& s) {
    const MuRhs& mu = enclosing_mu(s);
    MachineState n = s;
    const Frame& parent = s.frames[s.frames.size() - 2];
    const Frame& top = s.frames.back();
    n.frames.back() = Frame{with(parent.env, mu.loopvar, get(top.env, mu.exit)), 0, top.iters + 1};
    return n;
}

}  // namespace

bool MachineState::terminal() const { return frames.size() == 1 && frames.back().pc == root.size(); }

MachineState initial_state(const Term& term) {
    return MachineState{term.ctx, {Frame{Env(term.var_count()), 0, 0}}};
}

std::vector<MachineState> step(const MachineState& s, const EnumBudget& budget) {
    std::vector<MachineState> out;
    const std::size_t depth = s.frames.size() - 1;
    const Context& ctx = context_at(s, depth);
    const Frame& top = s.frames.back();
    auto advance = [&](Value v, const Var& x) {
        MachineState n = s;
        Frame& f = n.frames.back();
        f.env = with(std::move(f.env), x, std::move(v));
        ++f.pc;
        out.push_back(std::move(n));
    };
    if (top.pc < ctx.size()) {
        const Def& d = ctx[top.pc];
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, OpRhs>) {
                    advance(eval_op(r, top.env), d.bound);
                } else if constexpr (std::is_same_v<T, NondetRhs>) {
                    advance(get(top.env, r.a), d.bound);
                    advance(get(top.env, r.b), d.bound);
                } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                    advance(eval_assume(r, top.env), d.bound);
                } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                    for (auto& v : enumerate_sort(d.bound.sort(), budget)) {
                        advance(std::move(v), d.bound);
                    }
                } else {
                    // do not enter loop
                    advance(get(top.env, r.init), d.bound);
                    // enter loop
                    MachineState n = s;
                    n.frames.push_back(Frame{with(top.env, r.loopvar, get(top.env, r.init)), 0, 1});
                    out.push_back(std::move(n));
                }
            },
            ctx[top.pc].rhs);
        return out;
    }
    if (depth == 0) {
        return out;
    }
    const MuRhs& mu = enclosing_mu(s);
    // loop exit
    {
        MachineState n = s;
        Value v = get(top.env, mu.exit);
        n.frames.pop_back();
        Frame& parent = n.frames.back();
        const Var& x = context_at(n, depth - 1)[parent.pc].bound;
        parent.env = with(std::move(parent.env), x, std::move(v));
        ++parent.pc;
        out.push_back(std::move(n));
    }
    // loop again
    if (top.iters < budget.max_mu_iters) {
        out.push_back(loop_again(s));
    }
    return out;
}

EnvSet reachable_results(const Term& term, const EnumBudget& budget) {
    budget.validate();
    using Key = std::vector<std::pair<Env, std::size_t>>;
    auto strip = [](const MachineState& s) {
        Key k;
        k.reserve(s.frames.size());
        for (const auto& f : s.frames) {
            k.emplace_back(f.env, f.pc);
        }
        return k;
    };

    std::set<MachineState> seen;
    std::set<Key> seen_stripped;
    std::vector<MachineState> overflow;
    std::deque<MachineState> queue;
    EnvSet results;

    MachineState init = initial_state(term);
    seen_stripped.insert(strip(init));
    seen.insert(init);
    queue.push_back(std::move(init));
    const std::size_t max_states = budget.max_env_count * 64;

    while (!queue.empty()) {
        MachineState s = std::move(queue.front());
        queue.pop_front();
        if (s.terminal()) {
            results.insert(s.frames.back().env);
            if (results.size() > budget.max_env_count) {
                throw BudgetExceeded("final environment set exceeds " + std::to_string(budget.max_env_count));
            }
            continue;
        }
        const Frame& top = s.frames.back();
        if (s.frames.size() > 1 && top.pc == context_at(s, s.frames.size() - 1).size() &&
            top.iters == budget.max_mu_iters && budget.mu_cap == EnumBudget::MuCap::Error) {
            overflow.push_back(loop_again(s));
        }
        for (auto& n : step(s, budget)) {
            if (seen.insert(n).second) {
                seen_stripped.insert(strip(n));
                if (seen.size() > max_states) {
                    throw BudgetExceeded("machine state space exceeds the budget");
                }
                queue.push_back(std::move(n));
            }
        }
    }
    // A capped loop-again is harmless only if an equivalent state (same
    // environments and positions, fewer iterations) was explored.
    for (const auto& o : overflow) {
        if (!seen_stripped.contains(strip(o))) {
            const Def& d = context_at(o, o.frames.size() - 2)[o.frames[o.frames.size() - 2].pc];
            throw BudgetExceeded("loop '" + d.bound.name() + "' did not stabilise within " +
                                 std::to_string(budget.max_mu_iters) + " iterations");
        }
    }
    return results;
}

}  // namespace laf
