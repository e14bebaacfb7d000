// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/relational.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "laf/nonrel.hpp"

namespace laf {

// ---------------------------------------------------------------------------
// EqRel

EqRel EqRel::bottom() {
    EqRel r;
    r.bottom_ = true;
    return r;
}

std::pair<Path, Integer> EqRel::find(const Path& p) const {
    auto it = parent_.find(p);
    if (it == parent_.end()) {
        return {p, 0};
    }
    return it->second;
}

void EqRel::add_eq(const Path& p, const Path& q, const Integer& k) {
    if (bottom_) {
        return;
    }
    auto [rp, op] = find(p);
    auto [rq, oq] = find(q);
    if (rp == rq) {
        if (op != oq + k) {
            *this = bottom();
        }
        return;
    }
    // rp + op = rq + oq + k; the larger root joins the smaller.
    Path lo = rp;
    Path hi = rq;
    Integer d = op - oq - k;  // rq = rp + d
    if (rq < rp) {
        std::swap(lo, hi);
        d = -d;
    }
    for (auto& [m, link] : parent_) {
        if (link.first == hi) {
            link = {lo, link.second + d};
        }
    }
    parent_[hi] = {lo, d};
}

void EqRel::havoc(VarId v) {
    if (bottom_) {
        return;
    }
    auto doomed = [v](const Path& p) { return !p.is_zero && p.var == v; };
    std::set<Path> roots;
    for (const auto& [m, link] : parent_) {
        if (doomed(link.first)) {
            roots.insert(link.first);
        }
    }
    for (const Path& r : roots) {
        std::optional<Path> nr;
        Integer base;
        for (const auto& [m, link] : parent_) {
            if (link.first == r && !doomed(m)) {
                nr = m;
                base = link.second;
                break;
            }
        }
        if (!nr) {
            continue;
        }
        for (auto& [m, link] : parent_) {
            if (link.first == r) {
                link = {*nr, link.second - base};
            }
        }
        parent_.erase(*nr);
    }
    std::erase_if(parent_, [&](const auto& kv) { return doomed(kv.first) || doomed(kv.second.first); });
}

std::optional<Integer> EqRel::offset(const Path& p, const Path& q) const {
    if (bottom_) {
        return Integer(0);
    }
    auto [rp, op] = find(p);
    auto [rq, oq] = find(q);
    if (rp != rq) {
        return std::nullopt;
    }
    return Integer(op - oq);
}

std::vector<std::tuple<Path, Path, Integer>> EqRel::atoms() const {
    std::vector<std::tuple<Path, Path, Integer>> out;
    for (const auto& [m, link] : parent_) {
        out.emplace_back(m, link.first, link.second);
    }
    return out;
}

bool EqRel::mentions(VarId v) const {
    return std::any_of(parent_.begin(), parent_.end(), [v](const auto& kv) {
        return (!kv.first.is_zero && kv.first.var == v) || (!kv.second.first.is_zero && kv.second.first.var == v);
    });
}

std::string EqRel::str(const std::function<std::string(VarId)>& name) const {
    if (bottom_) {
        return "bottom";
    }
    if (parent_.empty()) {
        return "top";
    }
    auto path = [&](const Path& p) {
        std::string s = name(p.var);
        for (unsigned i : p.idx) {
            s += "." + std::to_string(i);
        }
        return s;
    };
    std::string s = "{";
    bool first = true;
    for (const auto& [m, link] : parent_) {
        s += first ? "" : ", ";
        first = false;
        s += path(m) + " = ";
        if (link.first.is_zero) {
            s += link.second.str();
        } else {
            s += path(link.first);
            if (link.second > 0) {
                s += " + " + link.second.str();
            } else if (link.second < 0) {
                s += " - " + Integer(-link.second).str();
            }
        }
    }
    return s + "}";
}

EqRel meet(const EqRel& a, const EqRel& b) {
    if (a.bottom_ || b.bottom_) {
        return EqRel::bottom();
    }
    EqRel r = a;
    for (const auto& [m, link] : b.parent_) {
        r.add_eq(m, link.first, link.second);
    }
    return r;
}

EqRel join(const EqRel& a, const EqRel& b) {
    if (a.bottom_) {
        return b;
    }
    if (b.bottom_) {
        return a;
    }
    std::set<Path> paths;
    for (const auto* e : {&a, &b}) {
        for (const auto& [m, link] : e->parent_) {
            paths.insert(m);
            paths.insert(link.first);
        }
    }
    // Paths related in both with the same offsets share (root_a, root_b, oa - ob).
    std::map<std::tuple<Path, Path, Integer>, std::pair<Path, Integer>> leader;
    EqRel r;
    for (const Path& p : paths) {
        auto [ra, oa] = a.find(p);
        auto [rb, ob] = b.find(p);
        auto key = std::make_tuple(ra, rb, Integer(oa - ob));
        auto it = leader.find(key);
        if (it == leader.end()) {
            leader.emplace(std::move(key), std::make_pair(p, oa));
        } else {
            r.parent_[p] = {it->second.first, oa - it->second.second};
        }
    }
    return r;
}

bool leq(const EqRel& a, const EqRel& b) {
    if (a.bottom_) {
        return true;
    }
    if (b.bottom_) {
        return false;
    }
    return std::all_of(b.parent_.begin(), b.parent_.end(), [&](const auto& kv) {
        auto k = a.offset(kv.first, kv.second.first);
        return k && *k == kv.second.second;
    });
}

std::vector<std::vector<unsigned>> sort_leaves(const Sort& s) {
    if (!s.is_tuple()) {
        return {{}};
    }
    std::vector<std::vector<unsigned>> out;
    for (unsigned i = 0; i < s.elements().size(); ++i) {
        for (auto l : sort_leaves(s.elements()[i])) {
            l.insert(l.begin(), i);
            out.push_back(std::move(l));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Transfer functions

namespace {

Path at(const Var& v, const std::vector<unsigned>& prefix, const std::vector<unsigned>& leaf = {}) {
    std::vector<unsigned> idx = prefix;
    idx.insert(idx.end(), leaf.begin(), leaf.end());
    return Path::of(v.id(), std::move(idx));
}

// Offset a - b over all leaves, when every leaf pair is related.
std::optional<std::vector<Integer>> leaf_offsets(const EqRel& d, const Var& a, const Var& b) {
    std::vector<Integer> out;
    for (const auto& l : sort_leaves(a.sort())) {
        auto k = d.offset(at(a, l), at(b, l));
        if (!k) {
            return std::nullopt;
        }
        out.push_back(*k);
    }
    return out;
}

}  // namespace

EqRel assign_copy(EqRel d, const Var& x, const Var& y) {
    d.havoc(x.id());
    for (const auto& l : sort_leaves(x.sort())) {
        d.add_eq(at(x, l), at(y, l), 0);
    }
    return d;
}

EqRel assign_transfer(EqRel d, const Var& x, const OpRhs& rhs) {
    d.havoc(x.id());
    if (d.is_bottom()) {
        return d;
    }
    const Path px = Path::of(x.id());
    const auto& args = rhs.args;
    auto cst = [&](std::size_t i) { return d.constant(Path::of(args[i].id())); };
    auto set_const = [&](const Integer& k) { d.add_const(px, k); };
    auto set_bool = [&](bool b) { d.add_const(px, b ? 1 : 0); };
    switch (rhs.op.kind) {
        case OpKind::IntConst:
        case OpKind::BoolConst:
        case OpKind::BvConst:
            set_const(rhs.op.value);
            break;
        case OpKind::Mk:
            for (unsigned i = 0; i < args.size(); ++i) {
                for (const auto& l : sort_leaves(args[i].sort())) {
                    d.add_eq(at(x, {i}, l), at(args[i], {}, l), 0);
                }
            }
            break;
        case OpKind::Get:
            for (const auto& l : sort_leaves(x.sort())) {
                d.add_eq(at(x, {}, l), at(args[0], {rhs.op.a}, l), 0);
            }
            break;
        case OpKind::Add:
            if (auto k = cst(1)) {
                d.add_eq(px, Path::of(args[0].id()), *k);
            } else if (auto k0 = cst(0)) {
                d.add_eq(px, Path::of(args[1].id()), *k0);
            }
            break;
        case OpKind::Sub:
            if (auto k = cst(1)) {
                d.add_eq(px, Path::of(args[0].id()), -*k);
            } else if (auto k2 = d.offset(Path::of(args[0].id()), Path::of(args[1].id()))) {
                set_const(*k2);
            }
            break;
        case OpKind::Neg:
            if (auto k = cst(0)) {
                set_const(-*k);
            }
            break;
        case OpKind::Mul: {
            auto k0 = cst(0);
            auto k1 = cst(1);
            if (k0 && k1) {
                set_const(*k0 * *k1);
            } else if ((k0 && *k0 == 0) || (k1 && *k1 == 0)) {
                set_const(0);
            } else if (k0 && *k0 == 1) {
                d.add_eq(px, Path::of(args[1].id()), 0);
            } else if (k1 && *k1 == 1) {
                d.add_eq(px, Path::of(args[0].id()), 0);
            }
            break;
        }
        case OpKind::Div: {
            auto k0 = cst(0);
            auto k1 = cst(1);
            if (k0 && k1 && *k1 != 0) {
                set_const(tdiv(*k0, *k1));
            } else if (k1 && *k1 == 1) {
                d.add_eq(px, Path::of(args[0].id()), 0);
            }
            break;
        }
        case OpKind::Eq:
            if (auto ks = leaf_offsets(d, args[0], args[1])) {
                const bool all_zero = std::all_of(ks->begin(), ks->end(), [](const Integer& k) { return k == 0; });
                // Distinct booleans or bitvectors at a non-zero offset are still unequal.
                set_bool(all_zero);
            }
            break;
        case OpKind::Lt:
            if (auto k = d.offset(Path::of(args[0].id()), Path::of(args[1].id()))) {
                set_bool(*k < 0);
            }
            break;
        case OpKind::Le:
            if (auto k = d.offset(Path::of(args[0].id()), Path::of(args[1].id()))) {
                set_bool(*k <= 0);
            }
            break;
        case OpKind::Not:
            if (auto k = cst(0)) {
                set_bool(*k == 0);
            }
            break;
        case OpKind::And:
        case OpKind::Or: {
            const bool absorb = rhs.op.kind == OpKind::Or;
            auto k0 = cst(0);
            auto k1 = cst(1);
            if ((k0 && (*k0 != 0) == absorb) || (k1 && (*k1 != 0) == absorb)) {
                set_bool(absorb);
            } else if (k0) {
                d.add_eq(px, Path::of(args[1].id()), 0);
            } else if (k1) {
                d.add_eq(px, Path::of(args[0].id()), 0);
            }
            break;
        }
        case OpKind::Extract:
        case OpKind::Concat:
            if (std::all_of(args.begin(), args.end(), [&](const Var& a) { return d.constant(Path::of(a.id())); })) {
                std::vector<Value> vals;
                for (const auto& a : args) {
                    vals.push_back(Value::bitvec(a.sort().width(), *d.constant(Path::of(a.id()))));
                }
                set_const(apply_op(rhs.op, vals).bits());
            }
            break;
    }
    return d;
}

// ---------------------------------------------------------------------------
// Environment and domain

const EqRel* RelEnv::lookup(const Var& v) const {
    return v.id() < elems.size() && elems[v.id()] ? &*elems[v.id()] : nullptr;
}

std::string RelEnv::name_of(VarId id) const {
    return id < vars.size() && vars[id] ? vars[id]->name() : "v" + std::to_string(id);
}

std::string RelEnv::str() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < elems.size(); ++i) {
        if (elems[i]) {
            os << name_of(static_cast<VarId>(i)) << " : "
               << elems[i]->str([this](VarId v) { return name_of(v); }) << "\n";
        }
    }
    return os.str();
}

namespace {

const RelEnv& as_env(const AbsState& s) { return dynamic_cast<const RelEnv&>(s); }

void put(RelEnv& env, const Var& v, EqRel d) {
    if (env.elems.size() <= v.id()) {
        env.elems.resize(v.id() + 1);
        env.vars.resize(v.id() + 1);
        env.ops.resize(v.id() + 1);
    }
    env.elems[v.id()] = std::move(d);
    env.vars[v.id()] = v;
}

const EqRel& get(const RelEnv& env, const Var& v) {
    const EqRel* d = env.lookup(v);
    if (d == nullptr) {
        throw Error("relational domain: variable " + v.name() + " used before definition");
    }
    return *d;
}

}  // namespace

std::shared_ptr<const AbsState> RelationalDomain::initial() const { return std::make_shared<RelEnv>(); }

std::shared_ptr<const AbsState> RelationalDomain::eval(const Context& ctx, const AbsState& in) const {
    auto env = std::make_shared<RelEnv>(as_env(in));
    eval_into(ctx, *env);
    return env;
}

void RelationalDomain::eval_into(const Context& ctx, RelEnv& env) const {
    for (const auto& d : ctx) {
        eval_def(d, env);
    }
}

void RelationalDomain::eval_def(const Def& def, RelEnv& env) const {
    const Var& x = def.bound;
    if (const auto* op = std::get_if<OpRhs>(&def.rhs)) {
        EqRel d = EqRel::top();
        for (const auto& a : op->args) {
            d = meet(d, get(env, a));
        }
        put(env, x, assign_transfer(std::move(d), x, *op));
        env.ops[x.id()] = *op;
    } else if (const auto* nd = std::get_if<NondetRhs>(&def.rhs)) {
        EqRel d1 = assign_copy(get(env, nd->a), x, nd->a);
        EqRel d2 = assign_copy(get(env, nd->b), x, nd->b);
        put(env, x, join(d1, d2));
    } else if (std::holds_alternative<UnknownRhs>(def.rhs)) {
        put(env, x, EqRel::top());
    } else if (const auto* as = std::get_if<AssumeRhs>(&def.rhs)) {
        EqRel d = meet(get(env, as->cond), get(env, as->val));
        d.add_const(Path::of(as->cond.id()), 1);
        const auto& cdef = as->cond.id() < env.ops.size() ? env.ops[as->cond.id()] : std::nullopt;
        if (cdef && cdef->op.kind == OpKind::Eq) {
            for (const auto& l : sort_leaves(cdef->args[0].sort())) {
                d.add_eq(at(cdef->args[0], l), at(cdef->args[1], l), 0);
            }
        }
        put(env, x, assign_copy(std::move(d), x, as->val));
    } else {
        const auto& mu = std::get<MuRhs>(def.rhs);
        const EqRel di = assign_copy(get(env, mu.init), x, mu.init);
        std::vector<VarId> body_vars{mu.loopvar.id()};
        for_each_binder(mu.body, [&](const Var& v) { body_vars.push_back(v.id()); });
        EqRel cur = di;
        bool stable = false;
        for (unsigned round = 0; round < cfg_.loop_cap; ++round) {
            put(env, mu.loopvar, assign_copy(cur, mu.loopvar, x));
            eval_into(mu.body, env);
            EqRel de = assign_copy(get(env, mu.exit), x, mu.exit);
            for (VarId v : body_vars) {
                de.havoc(v);
            }
            EqRel next = join(di, de);
            if (leq(next, cur)) {
                cur = next;
                stable = true;
                break;
            }
            cur = join(cur, next);
        }
        if (!stable) {
            cur = EqRel::top();
            put(env, mu.loopvar, EqRel::top());
            eval_into(mu.body, env);
        }
        put(env, x, cur);
    }
}

namespace {

// Whether some model of d gives v the concrete value val.
bool binding_possible(const EqRel& d, const Var& v, const Value& val) {
    if (d.is_bottom()) {
        return false;
    }
    std::vector<std::pair<Path, Integer>> leaves;
    std::function<void(const Value&, std::vector<unsigned>)> walk = [&](const Value& x, std::vector<unsigned> idx) {
        if (x.kind() == Value::Kind::Tuple) {
            for (unsigned i = 0; i < x.elements().size(); ++i) {
                auto j = idx;
                j.push_back(i);
                walk(x.elements()[i], std::move(j));
            }
        } else {
            leaves.emplace_back(Path::of(v.id(), std::move(idx)), x.as_int());
        }
    };
    walk(val, {});
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        if (auto k = d.constant(leaves[i].first); k && *k != leaves[i].second) {
            return false;
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (auto k = d.offset(leaves[i].first, leaves[j].first); k && *k != leaves[i].second - leaves[j].second) {
                return false;
            }
        }
    }
    return true;
}

}  // namespace

Membership RelationalDomain::gamma_contains(const AbsState& state, const Env& env) const {
    const auto& st = as_env(state);
    for (VarId i = 0; i < env.size(); ++i) {
        if (!env[i] || env[i]->is_bottom() || i >= st.vars.size() || !st.vars[i]) {
            continue;
        }
        const Var& v = *st.vars[i];
        if (st.elems[i]->is_bottom()) {
            return Membership::no(v, v.name() + " is live but its element is bottom");
        }
        for (VarId j = 0; j < st.elems.size(); ++j) {
            // An element describes the runs where its own variable is live.
            const auto& d = st.elems[j];
            if (!d || j >= env.size() || !env[j] || env[j]->is_bottom()) {
                continue;
            }
            if (d->mentions(i) && !binding_possible(*d, v, *env[i])) {
                return Membership::no(v, v.name() + " = " + env[i]->str() + " contradicts " +
                                             d->str([&st](VarId id) { return st.name_of(id); }));
            }
        }
    }
    return Membership::yes();
}

Truth RelationalDomain::query(const AbsState& state, const Var& v) const {
    const EqRel& d = get(as_env(state), v);
    if (d.is_bottom()) {
        return Truth::Proved;
    }
    auto k = d.constant(Path::of(v.id()));
    if (!k) {
        return Truth::Unknown;
    }
    return *k != 0 ? Truth::Proved : Truth::Refuted;
}

std::string RelationalDomain::describe(const AbsState& state, const Var& v) const {
    const auto& st = as_env(state);
    const EqRel* d = st.lookup(v);
    return d == nullptr ? "?" : d->str([&st](VarId id) { return st.name_of(id); });
}

}  // namespace laf
