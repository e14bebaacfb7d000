// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/constraint.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "laf/nonrel.hpp"

namespace laf {

// ---------------------------------------------------------------------------
// Condition

Condition Condition::never() {
    Condition c;
    c.infeasible_ = true;
    return c;
}

void Condition::add(Lit l) {
    if (infeasible_) {
        return;
    }
    auto it = std::lower_bound(lits_.begin(), lits_.end(), Lit{l.var, false});
    for (auto j = it; j != lits_.end() && j->var == l.var; ++j) {
        if (j->pos == l.pos) {
            return;
        }
        lits_.clear();
        infeasible_ = true;
        return;
    }
    lits_.insert(std::lower_bound(lits_.begin(), lits_.end(), l), l);
}

void Condition::add_all(const Condition& c) {
    if (c.infeasible_) {
        lits_.clear();
        infeasible_ = true;
        return;
    }
    for (const Lit& l : c.lits_) {
        add(l);
    }
}

Condition Condition::with(Lit l) const {
    Condition c = *this;
    c.add(l);
    return c;
}

bool Condition::implies(const Condition& weaker) const {
    if (infeasible_) {
        return true;
    }
    if (weaker.infeasible_) {
        return false;
    }
    return std::includes(lits_.begin(), lits_.end(), weaker.lits_.begin(), weaker.lits_.end());
}

bool Condition::contradicts(const Condition& other) const {
    Condition c = *this;
    c.add_all(other);
    return c.infeasible();
}

Condition Condition::common(const Condition& other) const {
    if (infeasible_) {
        return other;
    }
    if (other.infeasible_) {
        return *this;
    }
    Condition c;
    std::set_intersection(lits_.begin(), lits_.end(), other.lits_.begin(), other.lits_.end(),
                          std::back_inserter(c.lits_));
    return c;
}

// ---------------------------------------------------------------------------
// State

const ConstraintState::Info* ConstraintState::info_of(VarId id) const {
    return id < info.size() && info[id] ? &*info[id] : nullptr;
}

const ConditionMap& ConstraintState::entries(VarId id) const {
    static const ConditionMap kNone;
    return id < store.size() ? store[id] : kNone;
}

std::string ConstraintState::var_name(VarId id) const {
    const Info* i = info_of(id);
    return i != nullptr ? i->var.name() : "v" + std::to_string(id);
}

std::string ConstraintState::cond_str(const Condition& c) const {
    if (c.infeasible()) {
        return "false";
    }
    if (c.lits().empty()) {
        return "true";
    }
    std::string s;
    for (const Lit& l : c.lits()) {
        if (!s.empty()) {
            s += "∧";
        }
        s += (l.pos ? "" : "¬") + var_name(l.var);
    }
    return s;
}

std::string ConstraintState::map_str(VarId id) const {
    std::string s;
    for (const auto& e : entries(id)) {
        if (!s.empty()) {
            s += ", ";
        }
        s += cond_str(e.cond) + " ⊩ " + e.val.str();
    }
    return s;
}

std::string ConstraintState::str() const {
    std::ostringstream os;
    for (const auto& d : out) {
        if (!entries(d.bound.id()).empty()) {
            os << d.bound.name() << " : " << map_str(d.bound.id()) << "\n";
        }
    }
    return os.str();
}

namespace {

constexpr std::size_t kMaxSources = 64;
constexpr std::size_t kMaxSplits = 4;

// ---------------------------------------------------------------------------
// Queries over a fixed state

class Evaluator {
  public:
    Evaluator(const ConstraintState& st, const ConstraintConfig& cfg) : st_(st), cfg_(cfg) {}

    [[nodiscard]] const LatticeConfig& lattice() const { return cfg_.lattice; }

    [[nodiscard]] Sort sort_of(VarId y) const {
        const auto* i = st_.info_of(y);
        if (i == nullptr) {
            throw Error("constraint variable without definition");
        }
        return i->var.sort();
    }

    [[nodiscard]] AbsValue top(VarId y) const { return AbsValue::top(sort_of(y), cfg_.lattice); }
    [[nodiscard]] AbsValue empty(VarId y) const { return AbsValue::empty(sort_of(y), cfg_.lattice); }

    /// Meet of the stored entries implied by c.
    [[nodiscard]] AbsValue stored(VarId y, const Condition& c) const {
        AbsValue v = top(y);
        for (const auto& e : st_.entries(y)) {
            if (c.implies(e.cond)) {
                v = meet(v, e.val);
            }
        }
        return v;
    }

    /// Value of y in runs where c holds: stored entries, lazily met with a
    /// forward evaluation through the definition and case splits on total
    /// literals.
    AbsValue eval(VarId y, const Condition& c) { return eval(y, c, cfg_.split_depth); }

    AbsValue eval(VarId y, const Condition& c, unsigned split) {
        if (c.infeasible()) {
            return empty(y);
        }
        auto key = std::make_tuple(y, split, c);
        if (auto it = memo_.find(key); it != memo_.end()) {
            return it->second;
        }
        AbsValue v = stored(y, c);
        const auto* info = st_.info_of(y);
        if (info != nullptr && !info->opaque) {
            v = meet(v, forward(*info, c, split));
        }
        if (split > 0 && !v.is_empty()) {
            std::vector<VarId> cands;
            for (const auto& e : st_.entries(y)) {
                if (c.implies(e.cond) || c.contradicts(e.cond)) {
                    continue;
                }
                std::vector<Lit> missing;
                std::set_difference(e.cond.lits().begin(), e.cond.lits().end(), c.lits().begin(), c.lits().end(),
                                    std::back_inserter(missing));
                if (missing.size() == 1 && std::find(cands.begin(), cands.end(), missing[0].var) == cands.end()) {
                    cands.push_back(missing[0].var);
                }
                if (cands.size() >= kMaxSplits) {
                    break;
                }
            }
            for (VarId l : cands) {
                if (!total(l, y)) {
                    continue;
                }
                AbsValue both = join(eval(y, c.with({l, true}), split - 1), eval(y, c.with({l, false}), split - 1));
                v = meet(v, both);
            }
        }
        memo_.emplace(std::move(key), v);
        return v;
    }

    void invalidate() { memo_.clear(); }

    /// True when y = ⊥ whenever l = ⊥, or l is never ⊥.
    [[nodiscard]] bool total(VarId l, VarId y) const {
        const auto* li = st_.info_of(l);
        if (li == nullptr) {
            return false;
        }
        if (li->dead_sources.empty()) {
            return true;
        }
        std::unordered_set<VarId> reach;
        std::vector<VarId> todo{y};
        while (!todo.empty()) {
            VarId v = todo.back();
            todo.pop_back();
            if (!reach.insert(v).second) {
                continue;
            }
            const auto* vi = st_.info_of(v);
            if (vi == nullptr) {
                continue;
            }
            if (const auto* op = std::get_if<OpRhs>(&vi->rhs)) {
                for (const auto& a : op->args) {
                    todo.push_back(a.id());
                }
            } else if (const auto* as = std::get_if<AssumeRhs>(&vi->rhs)) {
                todo.push_back(as->cond.id());
                todo.push_back(as->val.id());
            }
        }
        return std::all_of(li->dead_sources.begin(), li->dead_sources.end(),
                           [&](VarId s) { return reach.count(s) != 0; });
    }

  private:
    const ConstraintState& st_;
    const ConstraintConfig& cfg_;
    std::map<std::tuple<VarId, unsigned, Condition>, AbsValue> memo_;

    AbsValue forward(const ConstraintState::Info& info, const Condition& c, unsigned split) {
        const VarId y = info.var.id();
        if (const auto* op = std::get_if<OpRhs>(&info.rhs)) {
            std::vector<AbsValue> args;
            args.reserve(op->args.size());
            for (const auto& a : op->args) {
                args.push_back(eval(a.id(), c, split));
            }
            return transfer(op->op, args, cfg_.lattice);
        }
        if (const auto* nd = std::get_if<NondetRhs>(&info.rhs)) {
            return join(eval(nd->a.id(), c, split), eval(nd->b.id(), c, split));
        }
        if (const auto* as = std::get_if<AssumeRhs>(&info.rhs)) {
            Condition inner = c;
            if (info.guard) {
                inner.add_all(*info.guard);
            }
            if (inner.infeasible()) {
                return empty(y);
            }
            AbsValue k = eval(as->cond.id(), inner, split);
            if (!k.boolset().has(true)) {
                return empty(y);
            }
            return eval(as->val.id(), inner, split);
        }
        return top(y);
    }
};

// ---------------------------------------------------------------------------
// Generation, initial evaluation and propagation

struct Action {
    enum class Kind : std::uint8_t { Init, Seed, Loop };
    Kind kind = Kind::Init;
    VarId var = 0;
    Condition cond;
    Lit lit;
    std::size_t loop = 0;
    unsigned scope = 0;
};

struct Loop {
    VarId result = 0;
    VarId loopvar = 0;
    VarId exit = 0;
    VarId init = 0;
    unsigned scope = 0;
    std::vector<Action> actions;
    std::vector<VarId> vars;
};

class Engine {
  public:
    Engine(ConstraintState& st, const ConstraintConfig& cfg) : st_(st), cfg_(cfg), ev_(st, cfg) {}

    void translate_top(const Context& ctx) {
        std::vector<Action> actions;
        frames_.push_back(Frame{&st_.out, 0, &actions, nullptr, {}});
        for (const auto& d : ctx) {
            gen(d);
            for (const auto& a : actions) {
                run(a);
            }
            actions.clear();
        }
        frames_.pop_back();
    }

  private:
    struct Frame {
        std::vector<Def>* defs;
        unsigned scope;
        std::vector<Action>* actions;
        Loop* loop;
        std::map<Condition, Var> guard_vars;
    };

    ConstraintState& st_;
    const ConstraintConfig& cfg_;
    Evaluator ev_;
    std::vector<Frame> frames_;
    std::deque<Loop> loops_;

    Frame& frame() { return frames_.back(); }
    [[nodiscard]] bool at_top() const { return frames_.size() == 1; }

    void grow(VarId n) {
        if (st_.info.size() < n) {
            st_.info.resize(n);
            st_.store.resize(n);
        }
    }

    void bind_input(const Var& x, Var image, Condition cond) {
        if (st_.gv.size() <= x.id()) {
            st_.gv.resize(x.id() + 1);
            st_.gc.resize(x.id() + 1);
        }
        st_.gv[x.id()] = std::move(image);
        st_.gc[x.id()] = std::move(cond);
    }

    [[nodiscard]] const Var& image(const Var& x) const {
        if (x.id() >= st_.gv.size() || !st_.gv[x.id()]) {
            throw Error("constraint domain: variable " + x.name() + " used before definition");
        }
        return *st_.gv[x.id()];
    }
    [[nodiscard]] const Condition& cond(const Var& x) const { return *st_.gc[x.id()]; }

    std::vector<VarId> sources(VarId self, const Rhs& rhs) const {
        std::vector<VarId> out;
        auto add = [&](VarId v) {
            if (const auto* i = st_.info_of(v)) {
                out.insert(out.end(), i->dead_sources.begin(), i->dead_sources.end());
            } else {
                out.push_back(v);
            }
        };
        if (const auto* op = std::get_if<OpRhs>(&rhs)) {
            for (const auto& a : op->args) {
                add(a.id());
            }
            if (op->op.kind == OpKind::Div) {
                out.push_back(self);
            }
        } else if (const auto* nd = std::get_if<NondetRhs>(&rhs)) {
            add(nd->a.id());
            add(nd->b.id());
        } else if (std::holds_alternative<UnknownRhs>(rhs)) {
            return out;
        } else {
            out.push_back(self);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        if (out.size() > kMaxSources) {
            out = {self};
        }
        return out;
    }

    Var emit(Rhs rhs, const Sort& sort, const std::string& name, std::optional<Condition> guard = std::nullopt,
             bool opaque = false) {
        Var v = st_.pool->fresh(name, sort);
        grow(v.id() + 1);
        Frame& f = frame();
        ConstraintState::Info info{v, rhs, f.scope, std::move(guard), {}, sources(v.id(), rhs), opaque};
        Def d{v, rhs};
        for (const auto& o : operands(d)) {
            if (auto* oi = st_.info.size() > o.id() && st_.info[o.id()] ? &*st_.info[o.id()] : nullptr;
                oi != nullptr && oi->scope == f.scope) {
                oi->uses.push_back(v.id());
            }
        }
        st_.info[v.id()] = std::move(info);
        f.defs->push_back(std::move(d));
        for (auto& fr : frames_) {
            if (fr.loop != nullptr) {
                fr.loop->vars.push_back(v.id());
            }
        }
        return v;
    }

    void act(Action a) { frame().actions->push_back(std::move(a)); }

    /// Canonical literal of a boolean constraint variable, looking through
    /// negations. nullopt for the literal true; infeasible for false.
    std::optional<Lit> literal(Var v, bool& never) {
        bool pos = true;
        never = false;
        for (;;) {
            const auto* i = st_.info_of(v.id());
            const auto* op = i != nullptr ? std::get_if<OpRhs>(&i->rhs) : nullptr;
            if (op != nullptr && op->op.kind == OpKind::Not) {
                v = op->args[0];
                pos = !pos;
                continue;
            }
            if (op != nullptr && op->op.kind == OpKind::BoolConst) {
                never = (op->op.value != 0) != pos;
                return std::nullopt;
            }
            return Lit{v.id(), pos};
        }
    }

    Var cond_var(const Condition& c) {
        if (auto it = frame().guard_vars.find(c); it != frame().guard_vars.end()) {
            return it->second;
        }
        Var k;
        if (c.infeasible()) {
            k = emit(OpRhs{TheoryOp::bool_const(false), {}}, Sort::boolean(), "ff");
        } else {
            for (const Lit& l : c.lits()) {
                Var lv = st_.info[l.var]->var;
                if (!l.pos) {
                    lv = emit(OpRhs{TheoryOp::simple(OpKind::Not), {lv}}, Sort::boolean(), "n" + lv.name());
                }
                k = k.valid() ? emit(OpRhs{TheoryOp::simple(OpKind::And), {k, lv}}, Sort::boolean(), "k") : lv;
            }
        }
        frame().guard_vars.emplace(c, k);
        return k;
    }

    /// v when c is true, else assume(k, v) for a fresh guard k.
    Var guarded(const Condition& c, const Var& v, const std::string& name) {
        if (c.is_true()) {
            return v;
        }
        Var k = cond_var(c);
        return emit(AssumeRhs{k, v}, v.sort(), name, c);
    }

    void gen(const Def& d) {
        const Var& x = d.bound;
        if (const auto* op = std::get_if<OpRhs>(&d.rhs)) {
            std::vector<Var> args;
            Condition c;
            for (const auto& a : op->args) {
                args.push_back(image(a));
                c.add_all(cond(a));
            }
            Var y = emit(OpRhs{op->op, std::move(args)}, x.sort(), x.name());
            bind_input(x, y, c);
            act(Action{Action::Kind::Init, y.id(), c, {}, 0});
        } else if (const auto* nd = std::get_if<NondetRhs>(&d.rhs)) {
            const Condition& ca = cond(nd->a);
            const Condition& cb = cond(nd->b);
            Var a = guarded(ca, image(nd->a), nd->a.name() + "_g");
            Var b = guarded(cb, image(nd->b), nd->b.name() + "_g");
            Var y = emit(NondetRhs{a, b}, x.sort(), x.name());
            Condition c = ca.common(cb);
            bind_input(x, y, c);
            act(Action{Action::Kind::Init, y.id(), c, {}, 0});
        } else if (std::holds_alternative<UnknownRhs>(d.rhs)) {
            Var y = emit(UnknownRhs{}, x.sort(), x.name());
            bind_input(x, y, Condition::truth());
            act(Action{Action::Kind::Init, y.id(), Condition::truth(), {}, 0});
        } else if (const auto* as = std::get_if<AssumeRhs>(&d.rhs)) {
            Condition c = cond(as->cond);
            c.add_all(cond(as->val));
            bool never = false;
            std::optional<Lit> lit = literal(image(as->cond), never);
            if (never) {
                c = Condition::never();
            } else if (lit) {
                if (at_top() && !c.infeasible()) {
                    AbsValue k = ev_.eval(lit->var, c);
                    if (!k.boolset().has(lit->pos)) {
                        c = Condition::never();
                    }
                }
                c.add(*lit);
                if (!c.infeasible()) {
                    act(Action{Action::Kind::Seed, lit->var, {}, *lit, 0, frame().scope});
                }
            }
            bind_input(x, image(as->val), c);
        } else {
            gen_mu(x, std::get<MuRhs>(d.rhs));
        }
    }

    void gen_mu(const Var& x, const MuRhs& mu) {
        Var init = guarded(cond(mu.init), image(mu.init), mu.init.name() + "_g");
        loops_.emplace_back();
        const std::size_t idx = loops_.size() - 1;
        Loop& lp = loops_.back();
        lp.scope = st_.scopes++;
        lp.init = init.id();
        std::vector<Def> body;
        frames_.push_back(Frame{&body, lp.scope, &lp.actions, &lp, {}});
        Var s = emit(UnknownRhs{}, mu.loopvar.sort(), mu.loopvar.name(), std::nullopt, true);
        st_.info[s.id()]->dead_sources = {s.id()};
        lp.loopvar = s.id();
        bind_input(mu.loopvar, s, Condition::truth());
        for (const auto& d : mu.body) {
            gen(d);
        }
        Var e = guarded(cond(mu.exit), image(mu.exit), mu.exit.name() + "_g");
        if (st_.info[e.id()]->scope != lp.scope) {
            Var t = emit(OpRhs{TheoryOp::bool_const(true), {}}, Sort::boolean(), "tt");
            e = emit(AssumeRhs{t, e}, e.sort(), mu.exit.name() + "_g", Condition::truth());
        }
        lp.exit = e.id();
        frames_.pop_back();
        Var y = emit(MuRhs{s, Context(std::move(body)), e, init}, x.sort(), x.name(), std::nullopt, true);
        st_.info[y.id()]->dead_sources = {y.id()};
        lp.result = y.id();
        bind_input(x, y, Condition::truth());
        act(Action{Action::Kind::Loop, y.id(), {}, {}, idx});
    }

    // -- evaluation ---------------------------------------------------------

    void put(VarId y, const Condition& c, const AbsValue& v) {
        auto& m = st_.store[y];
        for (auto& e : m) {
            if (e.cond == c) {
                e.val = meet(e.val, v);
                ev_.invalidate();
                return;
            }
        }
        m.push_back(CondEntry{c, v});
        ev_.invalidate();
    }

    void run(const Action& a) {
        switch (a.kind) {
            case Action::Kind::Init:
                if (!a.cond.infeasible()) {
                    put(a.var, a.cond, ev_.eval(a.var, a.cond));
                }
                break;
            case Action::Kind::Seed:
                if (st_.info[a.lit.var]->scope == a.scope) {
                    propagate(a.lit);
                }
                break;
            case Action::Kind::Loop:
                run_loop(loops_[a.loop]);
                break;
        }
    }

    void propagate(Lit seed) {
        const unsigned scope = st_.info[seed.var]->scope;
        const Condition c0 = Condition::truth().with(seed);
        const AbsValue sv(BoolSet::of(seed.pos));
        const AbsValue cur = ev_.eval(seed.var, c0);
        if (meet(cur, sv) == cur) {
            return;
        }
        put(seed.var, c0, meet(cur, sv));

        std::set<VarId> refined;
        std::deque<std::pair<VarId, Condition>> queue{{seed.var, c0}};
        unsigned steps = 0;
        const bool back = cfg_.prop.direction != PropDirection::Forward;
        const bool fwd = cfg_.prop.direction != PropDirection::Backward;

        auto allowed = [&](VarId z) {
            if (z == seed.var || refined.count(z) != 0) {
                return true;
            }
            if (cfg_.prop.limit && refined.size() >= *cfg_.prop.limit) {
                return false;
            }
            refined.insert(z);
            return true;
        };
        auto refine = [&](VarId z, const Condition& cz, const AbsValue& now, const AbsValue& want) {
            if (cz.infeasible() || st_.info[z]->scope != scope) {
                return;
            }
            AbsValue r = meet(now, want);
            if (r == now || !allowed(z)) {
                return;
            }
            put(z, cz, r);
            queue.emplace_back(z, cz);
        };

        while (!queue.empty() && steps++ < cfg_.step_cap) {
            auto [y, c] = queue.front();
            queue.pop_front();
            const auto& info = *st_.info[y];
            const AbsValue vy = ev_.eval(y, c);
            if (back && !info.opaque) {
                if (const auto* op = std::get_if<OpRhs>(&info.rhs); op != nullptr && !op->args.empty()) {
                    std::vector<AbsValue> args;
                    for (const auto& a : op->args) {
                        args.push_back(ev_.eval(a.id(), c));
                    }
                    auto r = refine_args(op->op, vy, args, cfg_.lattice);
                    for (std::size_t i = 0; i < args.size(); ++i) {
                        refine(op->args[i].id(), c, ev_.eval(op->args[i].id(), c), r[i]);
                    }
                } else if (const auto* nd = std::get_if<NondetRhs>(&info.rhs)) {
                    for (auto [p, q] : {std::pair{nd->a.id(), nd->b.id()}, std::pair{nd->b.id(), nd->a.id()}}) {
                        Condition cp = c;
                        if (const auto& g = st_.info[p]->guard) {
                            cp.add_all(*g);
                        }
                        if (cp.infeasible()) {
                            continue;
                        }
                        const auto& gq = st_.info[q]->guard;
                        const bool q_dead = (gq && cp.contradicts(*gq)) || ev_.eval(q, cp).is_empty();
                        if (q_dead) {
                            refine(p, cp, ev_.eval(p, cp), vy);
                        }
                    }
                } else if (const auto* as = std::get_if<AssumeRhs>(&info.rhs)) {
                    Condition cv = c;
                    if (info.guard) {
                        cv.add_all(*info.guard);
                    }
                    refine(as->val.id(), cv, ev_.eval(as->val.id(), cv), vy);
                }
            }
            if (fwd) {
                for (VarId u : info.uses) {
                    if (st_.store[u].empty() || st_.info[u]->opaque) {
                        continue;
                    }
                    AbsValue nu = ev_.eval(u, c);
                    AbsValue su = ev_.stored(u, c);
                    AbsValue r = meet(su, nu);
                    if (r != su && allowed(u)) {
                        put(u, c, r);
                    }
                }
            }
        }
    }

    // Condition maps for loop heads, read like stored entries.
    AbsValue map_get(const ConditionMap& m, const Condition& k, const Sort& s) const {
        AbsValue v = AbsValue::top(s, cfg_.lattice);
        for (const auto& e : m) {
            if (k.implies(e.cond)) {
                v = meet(v, e.val);
            }
        }
        return v;
    }

    static std::vector<Condition> keys(const ConditionMap& a, const ConditionMap& b) {
        std::vector<Condition> ks;
        for (const auto* m : {&a, &b}) {
            for (const auto& e : *m) {
                if (std::find(ks.begin(), ks.end(), e.cond) == ks.end()) {
                    ks.push_back(e.cond);
                }
            }
        }
        return ks;
    }

    template <typename F>
    ConditionMap combine(const ConditionMap& a, const ConditionMap& b, const Sort& s, F f) const {
        ConditionMap out;
        for (const auto& k : keys(a, b)) {
            out.push_back(CondEntry{k, f(map_get(a, k, s), map_get(b, k, s))});
        }
        return out;
    }

    bool map_leq(const ConditionMap& a, const ConditionMap& b, const Sort& s) const {
        const auto ks = keys(a, b);
        return std::all_of(ks.begin(), ks.end(), [&](const Condition& k) { return leq(map_get(a, k, s), map_get(b, k, s)); });
    }

    void replay(Loop& lp, const ConditionMap& head) {
        for (VarId v : lp.vars) {
            st_.store[v].clear();
        }
        st_.store[lp.loopvar] = head;
        ev_.invalidate();
        for (const auto& a : lp.actions) {
            run(a);
        }
    }

    void run_loop(Loop& lp) {
        const Sort s = st_.info[lp.result]->var.sort();
        std::unordered_set<VarId> local(lp.vars.begin(), lp.vars.end());
        const ConditionMap init{CondEntry{Condition::truth(), ev_.eval(lp.init, Condition::truth())}};
        ConditionMap head = init;
        bool stable = false;
        for (unsigned round = 0; round < cfg_.loop_cap; ++round) {
            replay(lp, head);
            // Exit values with body-local literals quantified away.
            std::vector<Condition> ks{Condition::truth()};
            for (const auto& e : st_.store[lp.exit]) {
                Condition k;
                for (const Lit& l : e.cond.lits()) {
                    if (local.count(l.var) == 0) {
                        k.add(l);
                    }
                }
                if (!e.cond.infeasible() && std::find(ks.begin(), ks.end(), k) == ks.end()) {
                    ks.push_back(k);
                }
            }
            ConditionMap exits;
            for (const auto& k : ks) {
                exits.push_back(CondEntry{k, ev_.eval(lp.exit, k)});
            }
            ConditionMap next = combine(init, exits, s, [](const AbsValue& a, const AbsValue& b) { return join(a, b); });
            if (map_leq(next, head, s)) {
                stable = true;
                break;
            }
            if (round < cfg_.widen_delay) {
                head = combine(head, next, s, [](const AbsValue& a, const AbsValue& b) { return join(a, b); });
            } else {
                head = combine(head, next, s,
                               [&](const AbsValue& a, const AbsValue& b) { return widen(a, b, cfg_.lattice); });
            }
        }
        if (!stable) {
            head = {CondEntry{Condition::truth(), AbsValue::top(s, cfg_.lattice)}};
            replay(lp, head);
        }
        st_.store[lp.result] = head;
        ev_.invalidate();
    }
};

const ConstraintState& as_state(const AbsState& s) { return dynamic_cast<const ConstraintState&>(s); }

}  // namespace

// ---------------------------------------------------------------------------
// Domain

std::shared_ptr<const AbsState> ConstraintDomain::initial() const { return std::make_shared<ConstraintState>(); }

std::shared_ptr<const AbsState> ConstraintDomain::eval(const Context& ctx, const AbsState& in) const {
    auto st = std::make_shared<ConstraintState>(as_state(in));
    st->pool = std::make_shared<VarPool>(*st->pool);
    Engine(*st, cfg_).translate_top(ctx);
    return st;
}

Membership ConstraintDomain::gamma_contains(const AbsState& state, const Env& env) const {
    const auto& st = as_state(state);
    std::unordered_map<VarId, Value> assign;
    auto force = [&](VarId v, const Value& val) {
        auto [it, fresh] = assign.emplace(v, val);
        return fresh || it->second == val;
    };
    std::vector<VarId> dead;
    for (VarId i = 0; i < env.size() && i < st.gv.size(); ++i) {
        if (!env[i] || !st.gv[i]) {
            continue;
        }
        const Value& val = *env[i];
        const Condition& c = *st.gc[i];
        if (val.is_bottom()) {
            dead.push_back(i);
            continue;
        }
        const std::string name = st.var_name(st.gv[i]->id());
        if (c.infeasible()) {
            return Membership::no(std::nullopt, name + " is live under an infeasible condition");
        }
        if (!force(st.gv[i]->id(), val)) {
            return Membership::no(std::nullopt, "conflicting values for " + name);
        }
        for (const Lit& l : c.lits()) {
            if (!force(l.var, Value::boolean(l.pos))) {
                return Membership::no(std::nullopt, "condition of " + name + " cannot hold");
            }
        }
    }
    auto holds = [&](const Lit& l) {
        auto it = assign.find(l.var);
        return it != assign.end() && it->second == Value::boolean(l.pos);
    };
    for (VarId i : dead) {
        const Condition& c = *st.gc[i];
        if (c.infeasible() || assign.count(st.gv[i]->id()) == 0) {
            continue;
        }
        if (std::all_of(c.lits().begin(), c.lits().end(), holds)) {
            return Membership::no(std::nullopt, "dead variable with live image " + st.var_name(st.gv[i]->id()));
        }
    }
    for (const auto& [v, val] : assign) {
        for (const auto& e : st.entries(v)) {
            if (std::all_of(e.cond.lits().begin(), e.cond.lits().end(), holds) && !e.cond.infeasible() &&
                !laf::gamma_contains(e.val, val)) {
                return Membership::no(std::nullopt, st.var_name(v) + " : " + st.cond_str(e.cond) + " ⊩ " +
                                                        e.val.str() + " excludes " + val.str());
            }
        }
    }
    return Membership::yes();
}

AbsValue ConstraintDomain::query_at(const ConstraintState& st, VarId cvar, const Condition& c) const {
    Evaluator ev(st, cfg_);
    return ev.eval(cvar, c);
}

AbsValue ConstraintDomain::value_of(const ConstraintState& st, const Var& v) const {
    if (v.id() >= st.gv.size() || !st.gv[v.id()]) {
        throw Error("constraint domain: " + v.name() + " was not analysed");
    }
    return query_at(st, st.gv[v.id()]->id(), *st.gc[v.id()]);
}

Truth ConstraintDomain::query(const AbsState& state, const Var& v) const {
    return truth_of(value_of(as_state(state), v));
}

std::string ConstraintDomain::describe(const AbsState& state, const Var& v) const {
    const auto& st = as_state(state);
    if (v.id() >= st.gv.size() || !st.gv[v.id()]) {
        return "?";
    }
    std::string s = st.map_str(st.gv[v.id()]->id());
    if (s.empty()) {
        s = st.cond_str(*st.gc[v.id()]) + " ⊩ " + value_of(st, v).str();
    }
    return s;
}

}  // namespace laf
