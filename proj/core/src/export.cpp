// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/export.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_set>

#include "laf/relational.hpp"

namespace laf {

std::string FoSort::smt() const {
    switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::Int: return "Int";
    case Kind::BitVec: return "(_ BitVec " + std::to_string(width) + ")";
    }
    return "Int";
}

namespace {

// ------------------------------------------------------------ builders

FoP fvar(std::size_t i, FoSort s) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::Var;
    e->var = i;
    e->sort = s;
    return e;
}

FoP fbool(bool b) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::BoolLit;
    e->sort = FoSort::boolean();
    e->value = b ? 1 : 0;
    return e;
}

FoP fint(Integer v) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::IntLit;
    e->sort = FoSort::integer();
    e->value = std::move(v);
    return e;
}

FoP fbv(unsigned w, Integer bits) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::BvLit;
    e->sort = FoSort::bitvec(w);
    e->value = std::move(bits);
    return e;
}

FoP app(std::string op, FoSort s, std::vector<FoP> args) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::App;
    e->op = std::move(op);
    e->sort = s;
    e->args = std::move(args);
    return e;
}

FoP fand(std::vector<FoP> args) {
    if (args.empty()) {
        return fbool(true);
    }
    if (args.size() == 1) {
        return args[0];
    }
    return app("and", FoSort::boolean(), std::move(args));
}

FoP feq(FoP a, FoP b) { return app("=", FoSort::boolean(), {std::move(a), std::move(b)}); }
FoP fnot(FoP a) { return app("not", FoSort::boolean(), {std::move(a)}); }

FoP fpred(const std::string& name, std::vector<FoP> args) {
    auto e = std::make_shared<Fo>();
    e->kind = Fo::Kind::Pred;
    e->op = name;
    e->sort = FoSort::boolean();
    e->args = std::move(args);
    return e;
}

FoSort leaf_sort(const Sort& s) {
    if (s.is_bool()) {
        return FoSort::boolean();
    }
    if (s.is_bitvec()) {
        return FoSort::bitvec(s.width());
    }
    return FoSort::integer();
}

const Sort& sort_at(const Sort& s, const std::vector<unsigned>& path) {
    const Sort* cur = &s;
    for (unsigned i : path) {
        cur = &cur->elements()[i];
    }
    return *cur;
}

std::string sanitize(const std::string& name) {
    std::string out;
    for (char ch : name) {
        out += (std::isalnum(static_cast<unsigned char>(ch)) != 0 || ch == '_') ? ch : '_';
    }
    return out;
}

Integer euclid_div(const Integer& a, const Integer& b) {
    if (b == 0) {
        return 0;
    }
    Integer q = a / b;
    if (a - q * b < 0) {
        q += b > 0 ? -1 : 1;
    }
    return q;
}

void flatten(const Value& v, std::vector<Integer>& out) {
    if (v.kind() == Value::Kind::Tuple) {
        for (const auto& e : v.elements()) {
            flatten(e, out);
        }
    } else {
        out.push_back(v.as_int());
    }
}

Value rebuild(const Sort& s, const std::vector<Integer>& leaves, std::size_t& pos) {
    if (s.is_tuple()) {
        std::vector<Value> elems;
        for (const auto& e : s.elements()) {
            elems.push_back(rebuild(e, leaves, pos));
        }
        return Value::tuple(std::move(elems));
    }
    const Integer& x = leaves[pos++];
    if (s.is_bool()) {
        return Value::boolean(x != 0);
    }
    if (s.is_bitvec()) {
        return Value::bitvec(s.width(), x);
    }
    return Value::integer(x);
}

// ------------------------------------------------------------ encoder

class Encoder {
  public:
    std::vector<FoVar> vars;
    std::map<VarId, VarEnc> enc;
    std::map<std::size_t, FoP> equations;

    const VarEnc& declare(const Var& x) {
        if (auto it = enc.find(x.id()); it != enc.end()) {
            return it->second;
        }
        const std::string base = sanitize(x.name()) + "_" + std::to_string(x.id());
        VarEnc e;
        e.sort = x.sort();
        e.c = add("c_" + base, FoSort::boolean(), std::nullopt);
        for (const auto& path : sort_leaves(x.sort())) {
            std::string n = "v_" + base;
            for (unsigned i : path) {
                n += "_" + std::to_string(i);
            }
            e.leaves.push_back(add(n, leaf_sort(sort_at(x.sort(), path)), e.c));
        }
        return enc.emplace(x.id(), std::move(e)).first->second;
    }

    FoP c(const Var& x) { return fvar(declare(x).c, FoSort::boolean()); }
    std::vector<FoP> leaves(const Var& x) {
        std::vector<FoP> out;
        for (auto i : declare(x).leaves) {
            out.push_back(fvar(i, vars[i].sort));
        }
        return out;
    }
    FoP v(const Var& x) { return leaves(x).at(0); }
    std::vector<FoP> state(const Var& x) {
        std::vector<FoP> out{c(x)};
        auto l = leaves(x);
        out.insert(out.end(), l.begin(), l.end());
        return out;
    }

    // Value leaf i of x is defined by rhs.
    void define(std::vector<FoP>& out, const Var& x, std::size_t i, FoP rhs) {
        const std::size_t leaf = declare(x).leaves[i];
        equations[leaf] = rhs;
        out.push_back(feq(fvar(leaf, vars[leaf].sort), std::move(rhs)));
    }

    /// Constraints of a non-mu definition.
    void def(const Def& d, std::vector<FoP>& out) {
        const Var& x = d.bound;
        declare(x);
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, OpRhs>) {
                    op(x, r, out);
                } else if constexpr (std::is_same_v<R, NondetRhs>) {
                    auto branch = [&](const Var& a) {
                        std::vector<FoP> parts{c(a)};
                        auto xl = leaves(x);
                        auto al = leaves(a);
                        for (std::size_t i = 0; i < xl.size(); ++i) {
                            parts.push_back(feq(xl[i], al[i]));
                        }
                        return fand(std::move(parts));
                    };
                    out.push_back(app("=>", FoSort::boolean(),
                                      {c(x), app("or", FoSort::boolean(), {branch(r.a), branch(r.b)})}));
                } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                    out.push_back(feq(c(x), fand({c(r.cond), c(r.val), v(r.cond)})));
                    auto vl = leaves(r.val);
                    for (std::size_t i = 0; i < vl.size(); ++i) {
                        define(out, x, i, vl[i]);
                    }
                } else if constexpr (std::is_same_v<R, UnknownRhs>) {
                    out.push_back(feq(c(x), fbool(true)));
                } else {
                    // Loop results are not described; only definedness follows init.
                    out.push_back(feq(c(x), c(r.init)));
                }
            },
            d.rhs);
    }

  private:
    std::size_t add(std::string name, FoSort s, std::optional<std::size_t> owner) {
        vars.push_back(FoVar{std::move(name), s, owner});
        return vars.size() - 1;
    }

    void op(const Var& x, const OpRhs& r, std::vector<FoP>& out) {
        std::vector<FoP> defined;
        for (const auto& a : r.args) {
            defined.push_back(c(a));
        }
        const FoSort s = leaf_sort(x.sort().is_tuple() ? Sort::integer() : x.sort());
        auto arg = [&](std::size_t i) { return v(r.args[i]); };
        auto simple = [&](const char* name) {
            std::vector<FoP> as;
            for (std::size_t i = 0; i < r.args.size(); ++i) {
                as.push_back(arg(i));
            }
            return app(name, s, std::move(as));
        };
        FoP value;
        switch (r.op.kind) {
        case OpKind::BoolConst: value = fbool(r.op.value != 0); break;
        case OpKind::IntConst: value = fint(r.op.value); break;
        case OpKind::BvConst: value = fbv(r.op.a, r.op.value); break;
        case OpKind::And: value = simple("and"); break;
        case OpKind::Or: value = simple("or"); break;
        case OpKind::Not: value = simple("not"); break;
        case OpKind::Add: value = simple("+"); break;
        case OpKind::Sub:
        case OpKind::Neg: value = simple("-"); break;
        case OpKind::Mul: value = simple("*"); break;
        case OpKind::Lt: value = simple("<"); break;
        case OpKind::Le: value = simple("<="); break;
        case OpKind::Div: {
            // Truncating division through the Euclidean one.
            FoP a = arg(0);
            FoP b = arg(1);
            FoP pos = app("div", s, {a, b});
            FoP neg = app("-", s, {app("div", s, {app("-", s, {a}), b})});
            value = app("ite", s, {app(">=", FoSort::boolean(), {a, fint(0)}), pos, neg});
            defined.push_back(fnot(feq(b, fint(0))));
            break;
        }
        case OpKind::Eq: {
            auto al = leaves(r.args[0]);
            auto bl = leaves(r.args[1]);
            std::vector<FoP> parts;
            for (std::size_t i = 0; i < al.size(); ++i) {
                parts.push_back(feq(al[i], bl[i]));
            }
            value = fand(std::move(parts));
            break;
        }
        case OpKind::Extract: {
            auto e = std::make_shared<Fo>();
            e->kind = Fo::Kind::App;
            e->op = "extract";
            e->sort = s;
            e->hi = r.op.a;
            e->lo = r.op.b;
            e->args = {arg(0)};
            value = e;
            break;
        }
        case OpKind::Concat: value = simple("concat"); break;
        case OpKind::Mk: {
            std::size_t i = 0;
            for (const auto& a : r.args) {
                for (const auto& l : leaves(a)) {
                    define(out, x, i++, l);
                }
            }
            break;
        }
        case OpKind::Get: {
            const auto paths = sort_leaves(r.args[0].sort());
            const auto al = leaves(r.args[0]);
            std::size_t i = 0;
            for (std::size_t j = 0; j < paths.size(); ++j) {
                if (paths[j][0] == r.op.a) {
                    define(out, x, i++, al[j]);
                }
            }
            break;
        }
        }
        out.push_back(feq(c(x), fand(std::move(defined))));
        if (value) {
            define(out, x, 0, value);
        }
    }
};

void free_vars(const Context& ctx, std::set<VarId>& bound, std::map<VarId, Var>& free) {
    auto use = [&](const Var& v) {
        if (bound.count(v.id()) == 0) {
            free.emplace(v.id(), v);
        }
    };
    for (const auto& d : ctx) {
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, OpRhs>) {
                    for (const auto& a : r.args) {
                        use(a);
                    }
                } else if constexpr (std::is_same_v<R, NondetRhs>) {
                    use(r.a);
                    use(r.b);
                } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                    use(r.cond);
                    use(r.val);
                } else if constexpr (std::is_same_v<R, MuRhs>) {
                    use(r.init);
                    bound.insert(r.loopvar.id());
                    free_vars(r.body, bound, free);
                    use(r.exit);
                }
            },
            d.rhs);
        bound.insert(d.bound.id());
    }
}

std::vector<Var> captured(const MuRhs& mu) {
    std::set<VarId> bound{mu.loopvar.id()};
    std::map<VarId, Var> free;
    free_vars(mu.body, bound, free);
    if (bound.count(mu.exit.id()) == 0) {
        free.emplace(mu.exit.id(), mu.exit);
    }
    // The initial value is passed along so results stay tied to it.
    free.emplace(mu.init.id(), mu.init);
    std::vector<Var> out;
    for (const auto& [id, v] : free) {
        out.push_back(v);
    }
    return out;
}

void collect_vars(const Fo& e, std::set<std::size_t>& out) {
    if (e.kind == Fo::Kind::Var) {
        out.insert(e.var);
    }
    for (const auto& a : e.args) {
        collect_vars(*a, out);
    }
}

std::string literal_str(const Fo& e) {
    switch (e.kind) {
    case Fo::Kind::BoolLit: return e.value != 0 ? "true" : "false";
    case Fo::Kind::IntLit: return e.value < 0 ? "(- " + Integer(-e.value).str() + ")" : e.value.str();
    case Fo::Kind::BvLit: {
        std::string bits;
        for (unsigned i = e.sort.width; i-- > 0;) {
            bits += bit_test(e.value, i) ? '1' : '0';
        }
        return "#b" + bits;
    }
    default: return "";
    }
}

std::vector<FoP> target_eqs(const std::vector<FoVar>& vars, const VarEnc& g, const Value& target) {
    std::vector<Integer> leaves;
    flatten(target, leaves);
    if (leaves.size() != g.leaves.size()) {
        throw Error("export: target value does not match the goal's sort");
    }
    std::vector<FoP> out;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
        const FoSort s = vars[g.leaves[i]].sort;
        FoP lit = s.kind == FoSort::Kind::Bool   ? fbool(leaves[i] != 0)
                  : s.kind == FoSort::Kind::Int ? fint(leaves[i])
                                                : fbv(s.width, leaves[i]);
        out.push_back(feq(fvar(g.leaves[i], s), lit));
    }
    return out;
}

void declarations(std::ostringstream& os, const std::vector<FoVar>& vars) {
    for (const auto& v : vars) {
        os << "(declare-const " << v.name << " " << v.sort.smt() << ")\n";
    }
}

}  // namespace

// ------------------------------------------------------------ evaluation

std::optional<Integer> fo_eval(const Fo& e, const Assignment& a) {
    switch (e.kind) {
    case Fo::Kind::Var: return e.var < a.size() ? a[e.var] : std::nullopt;
    case Fo::Kind::BoolLit:
    case Fo::Kind::IntLit:
    case Fo::Kind::BvLit: return e.value;
    case Fo::Kind::Pred: return std::nullopt;
    case Fo::Kind::App: break;
    }
    const std::string& op = e.op;
    if (op == "and" || op == "or") {
        const bool is_and = op == "and";
        bool unknown = false;
        for (const auto& x : e.args) {
            auto r = fo_eval(*x, a);
            if (!r) {
                unknown = true;
            } else if ((*r != 0) != is_and) {
                return Integer(is_and ? 0 : 1);
            }
        }
        return unknown ? std::nullopt : std::optional<Integer>(is_and ? 1 : 0);
    }
    if (op == "=>") {
        auto p = fo_eval(*e.args[0], a);
        if (p && *p == 0) {
            return Integer(1);
        }
        auto q = fo_eval(*e.args[1], a);
        if (q && *q != 0) {
            return Integer(1);
        }
        if (p && q) {
            return Integer(0);
        }
        return std::nullopt;
    }
    if (op == "ite") {
        auto c = fo_eval(*e.args[0], a);
        if (!c) {
            return std::nullopt;
        }
        return fo_eval(*e.args[*c != 0 ? 1 : 2], a);
    }
    std::vector<Integer> xs;
    for (const auto& x : e.args) {
        auto r = fo_eval(*x, a);
        if (!r) {
            return std::nullopt;
        }
        xs.push_back(std::move(*r));
    }
    auto b = [](bool v) { return Integer(v ? 1 : 0); };
    if (op == "not") {
        return b(xs[0] == 0);
    }
    if (op == "=") {
        return b(xs[0] == xs[1]);
    }
    if (op == "+") {
        return xs[0] + xs[1];
    }
    if (op == "-") {
        return xs.size() == 1 ? Integer(-xs[0]) : Integer(xs[0] - xs[1]);
    }
    if (op == "*") {
        return xs[0] * xs[1];
    }
    if (op == "div") {
        return euclid_div(xs[0], xs[1]);
    }
    if (op == "<") {
        return b(xs[0] < xs[1]);
    }
    if (op == "<=") {
        return b(xs[0] <= xs[1]);
    }
    if (op == ">=") {
        return b(xs[0] >= xs[1]);
    }
    if (op == "extract") {
        const Integer mask = (Integer(1) << (e.hi - e.lo + 1)) - 1;
        return (xs[0] >> e.lo) & mask;
    }
    if (op == "concat") {
        return (xs[0] << e.args[1]->sort.width) | xs[1];
    }
    throw Error("fo_eval: unknown operator " + op);
}

std::string fo_str(const Fo& e, const std::vector<FoVar>& vars) {
    switch (e.kind) {
    case Fo::Kind::Var: return vars[e.var].name;
    case Fo::Kind::BoolLit:
    case Fo::Kind::IntLit:
    case Fo::Kind::BvLit: return literal_str(e);
    case Fo::Kind::App:
    case Fo::Kind::Pred: break;
    }
    std::string head = e.op == "extract" ? "(_ extract " + std::to_string(e.hi) + " " + std::to_string(e.lo) + ")" : e.op;
    if (e.args.empty()) {
        return head;
    }
    std::string out = "(" + head;
    for (const auto& a : e.args) {
        out += " " + fo_str(*a, vars);
    }
    return out + ")";
}

const VarEnc& FoFormula::of(const Var& v) const {
    auto it = enc.find(v.id());
    if (it == enc.end()) {
        throw Error("export: variable '" + v.name() + "' is not translated");
    }
    return it->second;
}

const VarEnc& HornSystem::of(const Var& v) const {
    auto it = enc.find(v.id());
    if (it == enc.end()) {
        throw Error("export: variable '" + v.name() + "' is not translated");
    }
    return it->second;
}

// ------------------------------------------------------------ FO

FoFormula to_fo(const Term& term) {
    Encoder e;
    FoFormula f;
    for (const auto& d : term.ctx) {
        e.def(d, f.conjuncts);
    }
    f.vars = std::move(e.vars);
    f.enc = std::move(e.enc);
    f.equations = std::move(e.equations);
    return f;
}

bool satisfies(const FoFormula& f, const Assignment& a) {
    return std::all_of(f.conjuncts.begin(), f.conjuncts.end(), [&](const FoP& c) {
        auto r = fo_eval(*c, a);
        return r && *r != 0;
    });
}

Assignment embed_model(const FoFormula& f, const Term& term, const Env& env) {
    Assignment a(f.vars.size());
    for (const auto& d : term.ctx) {
        const Var& x = d.bound;
        if (std::holds_alternative<MuRhs>(d.rhs)) {
            throw Error("embed_model: the term contains a loop");
        }
        if (x.id() >= env.size() || !env[x.id()]) {
            throw Error("embed_model: the environment does not bind '" + x.name() + "'");
        }
        const Value& val = *env[x.id()];
        const VarEnc& xe = f.of(x);
        if (!val.is_bottom()) {
            if (!val.has_sort(x.sort())) {
                throw Error("embed_model: value of '" + x.name() + "' has the wrong sort");
            }
            a[xe.c] = 1;
            std::vector<Integer> leaves;
            flatten(val, leaves);
            for (std::size_t i = 0; i < leaves.size(); ++i) {
                a[xe.leaves[i]] = leaves[i];
            }
            continue;
        }
        a[xe.c] = 0;
        for (auto leaf : xe.leaves) {
            auto it = f.equations.find(leaf);
            std::optional<Integer> v;
            if (it != f.equations.end()) {
                v = fo_eval(*it->second, a);
            }
            a[leaf] = v.value_or(0);
        }
    }
    for (const auto& c : f.conjuncts) {
        auto r = fo_eval(*c, a);
        if (!r || *r == 0) {
            throw Error("embed_model: not an environment of the term; violated: " + fo_str(*c, f.vars));
        }
    }
    return a;
}

std::string emit_smtlib(const FoFormula& f, const Var& goal, const Value& target) {
    std::ostringstream os;
    os << "; LAF first-order export\n(set-logic ALL)\n";
    declarations(os, f.vars);
    for (const auto& c : f.conjuncts) {
        os << "(assert " << fo_str(*c, f.vars) << ")\n";
    }
    const VarEnc& g = f.of(goal);
    os << "(assert " << f.vars[g.c].name << ")\n";
    for (const auto& eq : target_eqs(f.vars, g, target)) {
        os << "(assert " << fo_str(*eq, f.vars) << ")\n";
    }
    os << "(check-sat)\n";
    return os.str();
}

// ------------------------------------------------------------ Horn

HornSystem to_horn(const Term& term) {
    Encoder e;
    HornSystem h;
    std::function<void(const Context&, std::vector<FoP>&)> scope = [&](const Context& ctx, std::vector<FoP>& conj) {
        for (const auto& d : ctx) {
            const auto* mu = std::get_if<MuRhs>(&d.rhs);
            if (mu == nullptr) {
                e.def(d, conj);
                continue;
            }
            HornPred p;
            p.mu = d.bound.id();
            p.name = "Inv_" + sanitize(d.bound.name()) + "_" + std::to_string(d.bound.id());
            p.captured = captured(*mu);
            std::vector<FoP> cargs;
            for (const auto& v : p.captured) {
                for (const auto& s : e.state(v)) {
                    cargs.push_back(s);
                    p.params.push_back(s->sort);
                }
            }
            for (const auto& s : e.state(mu->loopvar)) {
                p.params.push_back(s->sort);
            }
            auto apply = [&](const Var& st) {
                std::vector<FoP> args = cargs;
                auto s = e.state(st);
                args.insert(args.end(), s.begin(), s.end());
                return fpred(p.name, std::move(args));
            };
            const std::size_t idx = h.preds.size();
            h.preds.push_back(p);
            h.clauses.push_back(HornClause{"init_" + p.name, conj, apply(mu->init), idx, false});
            std::vector<FoP> body{apply(mu->loopvar)};
            scope(mu->body, body);
            h.clauses.push_back(HornClause{"step_" + p.name, std::move(body), apply(mu->exit), idx, true});
            e.declare(d.bound);
            conj.push_back(apply(d.bound));
        }
    };
    scope(term.ctx, h.top);
    h.vars = std::move(e.vars);
    h.enc = std::move(e.enc);
    return h;
}

std::string emit_horn(const HornSystem& h, const Var& goal, const Value& target) {
    std::ostringstream os;
    os << "; LAF Horn export\n(set-logic HORN)\n";
    for (const auto& p : h.preds) {
        os << "(declare-fun " << p.name << " (";
        for (std::size_t i = 0; i < p.params.size(); ++i) {
            os << (i ? " " : "") << p.params[i].smt();
        }
        os << ") Bool)\n";
    }
    auto clause = [&](const std::string& name, const std::vector<FoP>& body, const std::string& head, std::set<std::size_t> vs) {
        for (const auto& b : body) {
            collect_vars(*b, vs);
        }
        std::string impl;
        if (body.empty()) {
            impl = head;
        } else {
            impl = "(=> " + (body.size() == 1 ? fo_str(*body[0], h.vars) : [&] {
                std::string s = "(and";
                for (const auto& b : body) {
                    s += " " + fo_str(*b, h.vars);
                }
                return s + ")";
            }()) + " " + head + ")";
        }
        std::string q;
        if (!vs.empty()) {
            q = "(forall (";
            bool first = true;
            for (auto v : vs) {
                q += std::string(first ? "" : " ") + "(" + h.vars[v].name + " " + h.vars[v].sort.smt() + ")";
                first = false;
            }
            impl = q + ") " + impl + ")";
        }
        os << "(assert (! " << impl << " :named " << name << "))\n";
    };
    for (const auto& c : h.clauses) {
        std::set<std::size_t> vs;
        collect_vars(*c.head, vs);
        clause(c.name, c.body, fo_str(*c.head, h.vars), vs);
    }
    std::vector<FoP> q = h.top;
    const VarEnc& g = h.of(goal);
    q.push_back(fvar(g.c, FoSort::boolean()));
    for (const auto& eq : target_eqs(h.vars, g, target)) {
        q.push_back(eq);
    }
    clause("query", q, "false", {});
    os << "(check-sat)\n";
    return os.str();
}

// ------------------------------------------------------------ bounded evaluation

namespace {

using Relation = std::map<std::vector<Integer>, std::size_t>;

class Search {
  public:
    Search(const HornSystem& h, const std::vector<Relation>& rels, const HornEvalConfig& cfg)
        : h_(h), rels_(rels), cfg_(cfg) {
        for (std::size_t i = 0; i < h.preds.size(); ++i) {
            index_[h.preds[i].name] = i;
        }
    }

    /// Calls fn on every solution of items that assigns all of `needed`.
    void run(std::vector<FoP> items, Assignment a, const std::vector<std::size_t>& needed,
             const std::function<void(const Assignment&)>& fn) {
        needed_ = &needed;
        fn_ = &fn;
        solve(std::move(items), std::move(a));
    }

  private:
    const HornSystem& h_;
    const std::vector<Relation>& rels_;
    const HornEvalConfig& cfg_;
    std::map<std::string, std::size_t> index_;
    const std::vector<std::size_t>* needed_ = nullptr;
    const std::function<void(const Assignment&)>* fn_ = nullptr;
    std::size_t nodes_ = 0;

    std::vector<Integer> domain(std::size_t v, const Assignment& a) const {
        const FoVar& fv = h_.vars[v];
        if (fv.owner && a[*fv.owner] && *a[*fv.owner] == 0) {
            return {0};  // value of a dead variable: one representative
        }
        std::vector<Integer> out;
        switch (fv.sort.kind) {
        case FoSort::Kind::Bool: return {0, 1};
        case FoSort::Kind::BitVec: {
            const Integer top = (Integer(1) << fv.sort.width) - 1;
            const Integer lo = fv.sort.width <= 4 ? Integer(0) : std::max(Integer(0), cfg_.lo);
            const Integer hi = fv.sort.width <= 4 ? top : std::min(top, cfg_.hi);
            for (Integer x = lo; x <= hi; ++x) {
                out.push_back(x);
            }
            return out;
        }
        case FoSort::Kind::Int: break;
        }
        for (Integer x = cfg_.lo; x <= cfg_.hi; ++x) {
            out.push_back(x);
        }
        return out;
    }

    static void collect_unassigned(const Fo& e, const Assignment& a, std::set<std::size_t>& out) {
        if (e.kind == Fo::Kind::Var && !a[e.var]) {
            out.insert(e.var);
        }
        for (const auto& x : e.args) {
            collect_unassigned(*x, a, out);
        }
    }

    // Unit step on one item: true when it is settled (and a may grow).
    static bool settle(const FoP& it, Assignment& a, bool& failed, std::vector<FoP>& extra) {
        if (it->kind == Fo::Kind::Pred) {
            return false;
        }
        if (auto r = fo_eval(*it, a)) {
            failed = *r == 0;
            return true;
        }
        if (it->kind == Fo::Kind::Var) {
            a[it->var] = 1;
            return true;
        }
        if (it->kind != Fo::Kind::App) {
            return false;
        }
        if (it->op == "and") {
            extra.insert(extra.end(), it->args.begin(), it->args.end());
            return true;
        }
        if (it->op == "not" && it->args[0]->kind == Fo::Kind::Var) {
            a[it->args[0]->var] = 0;
            return true;
        }
        if (it->op == "=") {
            for (int side = 0; side < 2; ++side) {
                const FoP& l = it->args[side];
                const FoP& r = it->args[1 - side];
                if (l->kind == Fo::Kind::Var && !a[l->var]) {
                    if (auto v = fo_eval(*r, a)) {
                        a[l->var] = *v;
                        return true;
                    }
                }
            }
        }
        return false;
    }

    void solve(std::vector<FoP> items, Assignment a) {
        if (++nodes_ > cfg_.max_solutions * 8) {
            throw Error("horn evaluation: search budget exceeded");
        }
        for (bool changed = true; changed;) {
            changed = false;
            std::vector<FoP> rest;
            std::vector<FoP> extra;
            for (const auto& it : items) {
                bool failed = false;
                if (settle(it, a, failed, extra)) {
                    if (failed) {
                        return;
                    }
                    changed = true;
                } else {
                    rest.push_back(it);
                }
            }
            rest.insert(rest.end(), extra.begin(), extra.end());
            changed = changed || !extra.empty();
            items = std::move(rest);
        }
        if (items.empty()) {
            for (auto v : *needed_) {
                if (!a[v]) {
                    for (const auto& x : domain(v, a)) {
                        Assignment b = a;
                        b[v] = x;
                        solve({}, std::move(b));
                    }
                    return;
                }
            }
            (*fn_)(a);
            return;
        }
        // Branch: predicate applications first, then disjunctions, then a variable.
        auto pick = [&](auto pred) -> std::optional<std::size_t> {
            for (std::size_t i = 0; i < items.size(); ++i) {
                if (pred(*items[i])) {
                    return i;
                }
            }
            return std::nullopt;
        };
        auto without = [&](std::size_t i) {
            std::vector<FoP> out = items;
            out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
            return out;
        };
        if (auto i = pick([](const Fo& e) { return e.kind == Fo::Kind::Pred; })) {
            const Fo& p = *items[*i];
            const auto base = without(*i);
            for (const auto& [tuple, depth] : rels_[index_.at(p.op)]) {
                Assignment b = a;
                bool ok = true;
                for (std::size_t j = 0; j < tuple.size() && ok; ++j) {
                    const std::size_t v = p.args[j]->var;
                    if (b[v]) {
                        ok = *b[v] == tuple[j];
                    } else {
                        b[v] = tuple[j];
                    }
                }
                if (ok) {
                    solve(base, std::move(b));
                }
            }
            return;
        }
        if (auto i = pick([](const Fo& e) { return e.kind == Fo::Kind::App && (e.op == "or" || e.op == "=>"); })) {
            const Fo& d = *items[*i];
            const auto base = without(*i);
            std::vector<std::vector<FoP>> choices;
            if (d.op == "or") {
                for (const auto& x : d.args) {
                    choices.push_back({x});
                }
            } else {
                choices.push_back({fnot(d.args[0])});
                choices.push_back({d.args[0], d.args[1]});
            }
            for (auto& ch : choices) {
                auto next = base;
                next.insert(next.end(), ch.begin(), ch.end());
                solve(std::move(next), a);
            }
            return;
        }
        // Enumerate a variable no pending equation would determine.
        std::set<std::size_t> defined;
        std::set<std::size_t> open;
        for (const auto& it : items) {
            if (it->kind == Fo::Kind::App && it->op == "=" && it->args[0]->kind == Fo::Kind::Var) {
                defined.insert(it->args[0]->var);
            }
            collect_unassigned(*it, a, open);
        }
        std::optional<std::size_t> v;
        for (auto x : open) {
            if (defined.count(x) == 0) {
                v = x;
                break;
            }
        }
        if (!v && !open.empty()) {
            v = *open.begin();
        }
        if (!v) {
            throw Error("horn evaluation: cannot make progress on " + fo_str(*items[0], h_.vars));
        }
        for (const auto& x : domain(*v, a)) {
            Assignment b = a;
            b[*v] = x;
            solve(items, std::move(b));
        }
    }
};

std::vector<std::size_t> vars_of(const std::vector<FoP>& args) {
    std::vector<std::size_t> out;
    for (const auto& x : args) {
        out.push_back(x->var);
    }
    return out;
}

}  // namespace

std::set<Value> horn_outcomes(const HornSystem& h, const Var& goal, const HornEvalConfig& cfg) {
    std::vector<Relation> rels(h.preds.size());
    for (bool changed = true; changed;) {
        changed = false;
        for (const auto& cl : h.clauses) {
            std::vector<std::pair<std::vector<Integer>, std::size_t>> found;
            const auto head_vars = vars_of(cl.head->args);
            auto emit = [&](std::size_t depth) {
                return [&, depth](const Assignment& a) {
                    std::vector<Integer> t;
                    for (auto v : head_vars) {
                        t.push_back(*a[v]);
                    }
                    found.emplace_back(std::move(t), depth);
                };
            };
            Search search(h, rels, cfg);
            if (cl.step) {
                const FoP& self = cl.body[0];
                const std::vector<FoP> rest(cl.body.begin() + 1, cl.body.end());
                const Relation snapshot = rels[cl.pred];
                for (const auto& [tuple, depth] : snapshot) {
                    if (depth >= cfg.k) {
                        continue;
                    }
                    Assignment a(h.vars.size());
                    bool ok = true;
                    for (std::size_t j = 0; j < tuple.size() && ok; ++j) {
                        auto& slot = a[self->args[j]->var];
                        ok = !slot || *slot == tuple[j];
                        slot = tuple[j];
                    }
                    if (ok) {
                        search.run(rest, std::move(a), head_vars, emit(depth + 1));
                    }
                }
            } else {
                search.run(cl.body, Assignment(h.vars.size()), head_vars, emit(0));
            }
            auto& rel = rels[cl.pred];
            for (auto& [t, d] : found) {
                auto [it, fresh] = rel.emplace(std::move(t), d);
                if (fresh || d < it->second) {
                    it->second = d;
                    changed = true;
                }
            }
            if (rel.size() > cfg.max_solutions) {
                throw Error("horn evaluation: relation " + cl.head->op + " exceeds the budget");
            }
        }
    }
    const VarEnc& g = h.of(goal);
    std::vector<std::size_t> needed{g.c};
    needed.insert(needed.end(), g.leaves.begin(), g.leaves.end());
    std::set<Value> out;
    Search search(h, rels, cfg);
    search.run(h.top, Assignment(h.vars.size()), needed, [&](const Assignment& a) {
        if (*a[g.c] == 0) {
            out.insert(Value::bottom());
            return;
        }
        std::vector<Integer> leaves;
        for (auto l : g.leaves) {
            leaves.push_back(*a[l]);
        }
        std::size_t pos = 0;
        out.insert(rebuild(g.sort, leaves, pos));
    });
    return out;
}

std::string answer_str(SolverAnswer a) {
    switch (a) {
    case SolverAnswer::Sat: return "sat";
    case SolverAnswer::Unsat: return "unsat";
    case SolverAnswer::Unknown: return "unknown";
    case SolverAnswer::Error: return "error";
    }
    return "error";
}

SolverRun run_solver(const std::string& command, const std::string& path, unsigned timeout_s) {
    std::string cmd = command;
    const std::string quoted = "'" + path + "'";
    if (auto pos = cmd.find("{file}"); pos != std::string::npos) {
        cmd.replace(pos, 6, quoted);
    } else {
        cmd += " " + quoted;
    }
    cmd = "timeout " + std::to_string(timeout_s) + " " + cmd + " 2>&1";
    SolverRun run;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) {
        run.output = "cannot start: " + cmd;
        return run;
    }
    std::array<char, 4096> buf{};
    while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe) != nullptr) {
        run.output += buf.data();
    }
    const int status = pclose(pipe);
    std::istringstream lines(run.output);
    std::string line;
    while (std::getline(lines, line)) {
        if (line == "sat") {
            run.answer = SolverAnswer::Sat;
        } else if (line == "unsat") {
            run.answer = SolverAnswer::Unsat;
        } else if (line == "unknown" || line == "timeout") {
            run.answer = SolverAnswer::Unknown;
        }
    }
    if (status != 0 && run.answer == SolverAnswer::Error && WEXITSTATUS(status) == 124) {
        run.answer = SolverAnswer::Unknown;
    }
    return run;
}

Term pin_unknown(const Term& term, const Var& v, const Value& value) {
    std::vector<Def> defs;
    bool found = false;
    for (const auto& d : term.ctx) {
        if (d.bound == v && std::holds_alternative<UnknownRhs>(d.rhs)) {
            TheoryOp op = v.sort().is_bool()     ? TheoryOp::bool_const(value.as_bool())
                          : v.sort().is_bitvec() ? TheoryOp::bv_const(v.sort().width(), value.bits())
                                                 : TheoryOp::int_const(value.as_int());
            if (v.sort().is_tuple()) {
                throw Error("pin_unknown: tuple unknowns cannot be pinned");
            }
            defs.push_back(Def{d.bound, OpRhs{op, {}}});
            found = true;
        } else {
            defs.push_back(d);
        }
    }
    if (!found) {
        throw Error("pin_unknown: '" + v.name() + "' is not a top-level unknown");
    }
    return Term{Context(std::move(defs)), term.result};
}

}  // namespace laf
