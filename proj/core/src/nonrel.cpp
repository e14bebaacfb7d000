// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/nonrel.hpp"

#include <sstream>

namespace laf {

const AbsValue* NonRelEnv::lookup(const Var& v) const {
    if (v.id() >= slots.size() || !slots[v.id()]) {
        return nullptr;
    }
    return &*slots[v.id()];
}

void NonRelEnv::update(const Var& v, AbsValue a) {
    if (v.id() >= slots.size()) {
        slots.resize(v.id() + 1);
    }
    slots[v.id()] = std::move(a);
}

std::string NonRelEnv::str() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (std::size_t i = 0; i < slots.size(); ++i) {
        if (slots[i]) {
            os << (first ? "" : ", ") << "#" << i << " -> " << slots[i]->str();
            first = false;
        }
    }
    os << "}";
    return os.str();
}

std::size_t scalar_size(const AbsValue& a) {
    if (!a.is_tuple()) {
        return 1;
    }
    std::size_t n = 0;
    for (const auto& e : a.elements()) {
        n += scalar_size(e);
    }
    return n;
}

Truth truth_of(const AbsValue& a) {
    const BoolSet& b = a.boolset();
    if (!b.has(false)) {
        return Truth::Proved;
    }
    if (!b.has(true)) {
        return Truth::Refuted;
    }
    return Truth::Unknown;
}

std::string NonRelDomain::name() const {
    return cfg_.lattice.int_mode == IntMode::Interval ? "interval" : "constants";
}

std::shared_ptr<const AbsState> NonRelDomain::initial() const { return std::make_shared<NonRelEnv>(); }

std::shared_ptr<const AbsState> NonRelDomain::eval(const Context& ctx, const AbsState& in) const {
    auto out = std::make_shared<NonRelEnv>(dynamic_cast<const NonRelEnv&>(in));
    eval_into(ctx, *out);
    return out;
}

void NonRelDomain::eval_into(const Context& ctx, NonRelEnv& env) const {
    for (const auto& d : ctx) {
        eval_def(d, env);
    }
}

namespace {

const AbsValue& get(const NonRelEnv& env, const Var& v) {
    const AbsValue* a = env.lookup(v);
    if (a == nullptr) {
        throw Error("nonrel: variable " + v.name() + " has no abstract value");
    }
    return *a;
}

bool is_structural(const TheoryOp& op) {
    return op.is_literal() || op.kind == OpKind::Mk || op.kind == OpKind::Get;
}

}  // namespace

std::uint64_t NonRelDomain::count_ops_for(const Def& def, const NonRelEnv& env) const {
    return std::visit(
        [&](const auto& r) -> std::uint64_t {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, OpRhs>) {
                return is_structural(r.op) ? 0 : 1;
            } else if constexpr (std::is_same_v<R, NondetRhs>) {
                return scalar_size(get(env, r.a));
            } else {
                return 0;
            }
        },
        def.rhs);
}

void NonRelDomain::eval_def(const Def& def, NonRelEnv& env) const {
    const LatticeConfig& lc = cfg_.lattice;
    env.op_counter += count_ops_for(def, env);
    std::visit(
        [&](const auto& r) {
            using R = std::decay_t<decltype(r)>;
            if constexpr (std::is_same_v<R, OpRhs>) {
                std::vector<AbsValue> args;
                args.reserve(r.args.size());
                for (const auto& a : r.args) {
                    args.push_back(get(env, a));
                }
                env.update(def.bound, transfer(r.op, args, lc));
            } else if constexpr (std::is_same_v<R, NondetRhs>) {
                env.update(def.bound, join(get(env, r.a), get(env, r.b)));
            } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                // The condition is discarded.
                env.update(def.bound, get(env, r.val));
            } else if constexpr (std::is_same_v<R, UnknownRhs>) {
                env.update(def.bound, AbsValue::top(def.bound.sort(), lc));
            } else {
                AbsValue L = get(env, r.init);
                const AbsValue init = L;
                const std::uint64_t k = scalar_size(init);
                for (unsigned round = 0;; ++round) {
                    env.update(r.loopvar, L);
                    eval_into(r.body, env);
                    AbsValue next = join(get(env, r.exit), init);
                    env.op_counter += 2 * k;
                    if (leq(next, L)) {
                        break;
                    }
                    L = round < cfg_.widen_delay ? join(L, next) : widen(L, next, lc);
                }
                env.update(r.loopvar, L);
                env.update(def.bound, std::move(L));
            }
        },
        def.rhs);
}

Membership NonRelDomain::gamma_contains(const AbsState& state, const Env& env) const {
    const auto& s = dynamic_cast<const NonRelEnv&>(state);
    for (std::size_t i = 0; i < env.size(); ++i) {
        if (!env[i] || i >= s.slots.size() || !s.slots[i]) {
            continue;
        }
        if (!laf::gamma_contains(*s.slots[i], *env[i])) {
            return Membership::no(std::nullopt, "#" + std::to_string(i) + " = " + env[i]->str() + " outside " +
                                                    s.slots[i]->str());
        }
    }
    return Membership::yes();
}

Truth NonRelDomain::query(const AbsState& state, const Var& v) const {
    const auto& s = dynamic_cast<const NonRelEnv&>(state);
    const AbsValue* a = s.lookup(v);
    return a == nullptr ? Truth::Unknown : truth_of(*a);
}

std::string NonRelDomain::describe(const AbsState& state, const Var& v) const {
    const auto& s = dynamic_cast<const NonRelEnv&>(state);
    const AbsValue* a = s.lookup(v);
    return a == nullptr ? "?" : a->str();
}

}  // namespace laf
