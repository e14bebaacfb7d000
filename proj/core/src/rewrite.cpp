// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/rewrite.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_set>

#include "laf/text.hpp"

namespace laf {

namespace {

constexpr std::size_t kMaxSources = 64;

std::string rhs_str(const Rhs& rhs) {
    return std::visit(
        [](const auto& r) -> std::string {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, OpRhs>) {
                if (r.op.is_literal()) {
                    return print_literal(r.op);
                }
                std::string s = "(" + r.op.name();
                for (const auto& a : r.args) {
                    s += " " + a.name();
                }
                return s + ")";
            } else if constexpr (std::is_same_v<R, NondetRhs>) {
                return "(nondet " + r.a.name() + " " + r.b.name() + ")";
            } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                return "(assume " + r.cond.name() + " " + r.val.name() + ")";
            } else if constexpr (std::is_same_v<R, UnknownRhs>) {
                return "(unknown)";
            } else {
                return "(mu " + r.loopvar.name() + " ...)";
            }
        },
        rhs);
}

}  // namespace

// ---------------------------------------------------------------------------
// Rewriter

Rewriter::Rewriter(RewriteState& st, const std::vector<RewriteRule>& rules, unsigned fuel)
    : st_(st), rules_(rules), fuel_(fuel) {
    scopes_.push_back(&st_.out);
    for (const auto& d : st_.out) {
        info_[d.bound.id()] = Info{d.rhs, sources_of(d.bound, d.rhs)};
    }
}

const Rhs* Rewriter::view(const Var& v) const {
    auto it = info_.find(v.id());
    return it == info_.end() ? nullptr : &it->second.rhs;
}

std::optional<Integer> Rewriter::int_literal(const Var& v) const {
    if (const auto* r = view(v)) {
        if (const auto* o = std::get_if<OpRhs>(r); o != nullptr && o->op.kind == OpKind::IntConst) {
            return o->op.value;
        }
    }
    return std::nullopt;
}

std::vector<VarId> Rewriter::sources_of(const Var& v, const Rhs& rhs) const {
    auto of = [&](const Var& x) -> std::vector<VarId> {
        auto it = info_.find(x.id());
        return it == info_.end() ? std::vector<VarId>{x.id()} : it->second.dead_sources;
    };
    std::vector<VarId> out;
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, OpRhs>) {
                for (const auto& a : r.args) {
                    auto s = of(a);
                    out.insert(out.end(), s.begin(), s.end());
                }
                if (r.op.kind == OpKind::Div) {
                    out.push_back(v.id());
                }
            } else if constexpr (std::is_same_v<R, NondetRhs>) {
                // A dead choice comes from a dead branch.
                auto a = of(r.a);
                auto b = of(r.b);
                out.insert(out.end(), a.begin(), a.end());
                out.insert(out.end(), b.begin(), b.end());
            } else if constexpr (std::is_same_v<R, UnknownRhs>) {
            } else {
                out.push_back(v.id());
            }
        },
        rhs);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    if (out.size() > kMaxSources) {
        out = {v.id()};
    }
    return out;
}

bool Rewriter::never_dead(const Var& v) const {
    auto it = info_.find(v.id());
    return it != info_.end() && it->second.dead_sources.empty();
}

bool Rewriter::dead_implies(const Var& y, const Var& x) const {
    if (y == x) {
        return true;
    }
    auto it = info_.find(y.id());
    const std::vector<VarId> need = it == info_.end() ? std::vector<VarId>{y.id()} : it->second.dead_sources;
    if (need.empty()) {
        return true;
    }
    // Atoms reachable from x through strict dependencies: any of them dead
    // makes x dead.
    std::unordered_set<VarId> seen;
    std::vector<Var> stack{x};
    std::size_t found = 0;
    while (!stack.empty() && seen.size() < 4096) {
        Var cur = stack.back();
        stack.pop_back();
        if (!seen.insert(cur.id()).second) {
            continue;
        }
        if (std::binary_search(need.begin(), need.end(), cur.id()) && ++found == need.size()) {
            return true;
        }
        const Rhs* r = view(cur);
        if (r == nullptr) {
            continue;
        }
        if (const auto* o = std::get_if<OpRhs>(r)) {
            stack.insert(stack.end(), o->args.begin(), o->args.end());
        } else if (const auto* a = std::get_if<AssumeRhs>(r)) {
            stack.push_back(a->cond);
            stack.push_back(a->val);
        }
    }
    return false;
}

Var Rewriter::push(Rhs rhs, const Sort& sort, const std::string& name) {
    Var v = st_.pool->fresh(name, sort);
    auto src = sources_of(v, rhs);
    scopes_.back()->push_back(Def{v, rhs});
    info_[v.id()] = Info{std::move(rhs), std::move(src)};
    return v;
}

Var Rewriter::emit(Rhs rhs, const Sort& sort, const std::string& name) {
    if (budget_ > 0) {
        --budget_;
        for (const auto& rule : rules_) {
            if (auto r = rule.apply(*this, rhs, sort)) {
                return *r;
            }
        }
    }
    return push(std::move(rhs), sort, name);
}

Var Rewriter::emit_int(const Integer& v) { return emit(OpRhs{TheoryOp::int_const(v), {}}, Sort::integer(), "k"); }

Var Rewriter::emit_bool(bool v) { return emit(OpRhs{TheoryOp::bool_const(v), {}}, Sort::boolean(), "b"); }

Var Rewriter::image(const Var& in) const {
    auto r = st_.image(in);
    if (!r) {
        throw Error("rewrite: variable " + in.name() + " has no image");
    }
    return *r;
}

void Rewriter::translate(const Context& ctx) {
    auto record = [&](const Var& in, const Var& out) {
        if (st_.map.size() <= in.id()) {
            st_.map.resize(in.id() + 1);
        }
        st_.map[in.id()] = out;
    };
    for (const auto& d : ctx) {
        budget_ = fuel_;
        const Sort& sort = d.bound.sort();
        Var out = std::visit(
            [&](const auto& r) -> Var {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, OpRhs>) {
                    std::vector<Var> args;
                    for (const auto& a : r.args) {
                        args.push_back(image(a));
                    }
                    return emit(OpRhs{r.op, std::move(args)}, sort, d.bound.name());
                } else if constexpr (std::is_same_v<R, NondetRhs>) {
                    return emit(NondetRhs{image(r.a), image(r.b)}, sort, d.bound.name());
                } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                    return emit(AssumeRhs{image(r.cond), image(r.val)}, sort, d.bound.name());
                } else if constexpr (std::is_same_v<R, UnknownRhs>) {
                    return emit(UnknownRhs{}, sort, d.bound.name());
                } else {
                    Var init = image(r.init);
                    Var loop = st_.pool->fresh(r.loopvar.name(), r.loopvar.sort());
                    record(r.loopvar, loop);
                    std::vector<Def> body;
                    scopes_.push_back(&body);
                    translate(r.body);
                    Var exit = image(r.exit);
                    const bool local = std::any_of(body.begin(), body.end(),
                                                   [&](const Def& b) { return b.bound == exit; });
                    if (!local) {
                        Var t = push(OpRhs{TheoryOp::bool_const(true), {}}, Sort::boolean(), "b");
                        exit = push(AssumeRhs{t, exit}, exit.sort(), r.exit.name());
                    }
                    scopes_.pop_back();
                    return push(MuRhs{loop, Context(std::move(body)), exit, init}, sort, d.bound.name());
                }
            },
            d.rhs);
        record(d.bound, out);
    }
}

// ---------------------------------------------------------------------------
// State and domain

std::optional<Var> RewriteState::image(const Var& in) const {
    if (in.id() >= map.size()) {
        return std::nullopt;
    }
    return map[in.id()];
}

Term RewriteState::out_term(const Var& result) const { return Term{Context(out), result}; }

std::string RewriteState::str() const {
    if (out.empty()) {
        return "(empty)";
    }
    return print_term(out_term(out.back().bound));
}

std::shared_ptr<const AbsState> RewriteDomain::initial() const { return std::make_shared<RewriteState>(); }

std::shared_ptr<const AbsState> RewriteDomain::eval(const Context& ctx, const AbsState& in) const {
    const auto& src = dynamic_cast<const RewriteState&>(in);
    auto st = std::make_shared<RewriteState>();
    st->pool = std::make_shared<VarPool>(*src.pool);
    st->out = src.out;
    st->map = src.map;
    Rewriter rw(*st, cfg_.rules, cfg_.fuel);
    rw.translate(ctx);
    return st;
}

Term RewriteDomain::rewrite(const Term& term) const {
    auto st = std::dynamic_pointer_cast<const RewriteState>(analyze(term));
    return st->out_term(*st->image(term.result));
}

namespace {

void build_projection(const RewriteState& st, const EnumBudget& budget) {
    auto p = std::make_shared<RewriteState::Projection>();
    std::unordered_set<VarId> top;
    for (const auto& d : st.out) {
        top.insert(d.bound.id());
    }
    for (VarId i = 0; i < st.map.size(); ++i) {
        if (st.map[i] && top.contains(st.map[i]->id())) {
            p->keys.push_back(i);
        }
    }
    try {
        for (const auto& e : collect(Context(st.out), Env(st.pool->size()), budget)) {
            std::vector<Value> row;
            row.reserve(p->keys.size());
            for (VarId k : p->keys) {
                const auto& v = e[st.map[k]->id()];
                row.push_back(v ? *v : Value::bottom());
            }
            p->rows.insert(std::move(row));
        }
    } catch (const BudgetExceeded& e) {
        p->error = std::string("oracle: ") + e.what();
    }
    st.cache = std::move(p);
}

}  // namespace

Membership RewriteDomain::gamma_contains(const AbsState& state, const Env& env) const {
    const auto& st = dynamic_cast<const RewriteState&>(state);
    if (!st.cache) {
        build_projection(st, cfg_.budget);
    }
    const auto& p = *st.cache;
    if (!p.error.empty()) {
        return Membership::unknown(p.error);
    }
    std::vector<Value> want;
    bool wildcard = false;
    for (VarId k : p.keys) {
        if (k < env.size() && env[k]) {
            want.push_back(*env[k]);
        } else {
            want.push_back(Value::bottom());
            wildcard = true;
        }
    }
    if (cfg_.gamma == GammaMode::Exact && !wildcard) {
        if (p.rows.contains(want)) {
            return Membership::yes();
        }
    } else {
        for (const auto& row : p.rows) {
            bool ok = true;
            for (std::size_t i = 0; ok && i < row.size(); ++i) {
                const bool missing = p.keys[i] >= env.size() || !env[p.keys[i]];
                const bool free = missing || (cfg_.gamma == GammaMode::OverApprox && want[i].is_bottom());
                ok = free || row[i] == want[i];
            }
            if (ok) {
                return Membership::yes();
            }
        }
    }
    return Membership::no(std::nullopt, "no run of the rewritten term agrees");
}

Truth RewriteDomain::query(const AbsState& state, const Var& v) const {
    const auto& st = dynamic_cast<const RewriteState&>(state);
    auto img = st.image(v);
    if (!img) {
        return Truth::Unknown;
    }
    for (const auto& d : st.out) {
        if (d.bound == *img) {
            if (const auto* o = std::get_if<OpRhs>(&d.rhs); o != nullptr && o->op.kind == OpKind::BoolConst) {
                return o->op.value != 0 ? Truth::Proved : Truth::Refuted;
            }
            break;
        }
    }
    return Truth::Unknown;
}

std::string RewriteDomain::describe(const AbsState& state, const Var& v) const {
    const auto& st = dynamic_cast<const RewriteState&>(state);
    auto img = st.image(v);
    if (!img) {
        return "?";
    }
    for (const auto& d : st.out) {
        if (d.bound == *img) {
            return img->name() + " = " + rhs_str(d.rhs);
        }
    }
    return img->name();
}

}  // namespace laf
