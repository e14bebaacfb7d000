// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include <cctype>
#include <sstream>

#include "laf/rewrite.hpp"
#include "laf/text.hpp"

namespace laf {

namespace {

// Definitions are inlined up to this depth when matching.
constexpr unsigned kMatchDepthLimit = 3;

}  // namespace

// ---------------------------------------------------------------------------
// Patterns

namespace {

class PatternReader {
  public:
    explicit PatternReader(std::string_view s) : s_(s) {}

    Pattern read() {
        Pattern p = node();
        skip();
        if (i_ != s_.size()) {
            fail("trailing input");
        }
        return p;
    }

  private:
    std::string_view s_;
    std::size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        throw Error("pattern '" + std::string(s_) + "': " + msg);
    }

    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) {
            ++i_;
        }
    }

    std::string atom() {
        skip();
        std::size_t st = i_;
        while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')') {
            ++i_;
        }
        if (st == i_) {
            fail("expected an atom");
        }
        return std::string(s_.substr(st, i_ - st));
    }

    static std::optional<Sort> sort_name(std::string_view n) {
        if (n == "int") {
            return Sort::integer();
        }
        if (n == "bool") {
            return Sort::boolean();
        }
        if (n.starts_with("bv")) {
            unsigned w = 0;
            for (char c : n.substr(2)) {
                if (!std::isdigit(static_cast<unsigned char>(c))) {
                    return std::nullopt;
                }
                w = w * 10 + static_cast<unsigned>(c - '0');
            }
            return Sort::bitvec(w);
        }
        return std::nullopt;
    }

    Pattern leaf(const std::string& a) {
        Pattern p;
        if (a.starts_with("?")) {
            p.kind = Pattern::Kind::Hole;
            auto at = a.find('@');
            p.hole = a.substr(1, at == std::string::npos ? std::string::npos : at - 1);
            if (p.hole.empty()) {
                fail("empty hole name");
            }
            if (at != std::string::npos) {
                p.hole_sort = sort_name(std::string_view(a).substr(at + 1));
                if (!p.hole_sort) {
                    fail("unknown sort in '" + a + "'");
                }
            }
            return p;
        }
        if (a == "true" || a == "false") {
            p.kind = Pattern::Kind::Bool;
            p.value = a == "true" ? 1 : 0;
            return p;
        }
        try {
            p.value = Integer(a);
        } catch (const std::exception&) {
            fail("bad literal '" + a + "'");
        }
        p.kind = Pattern::Kind::Int;
        return p;
    }

    Pattern node() {
        skip();
        if (i_ >= s_.size()) {
            fail("unexpected end");
        }
        if (s_[i_] != '(') {
            return leaf(atom());
        }
        ++i_;
        const std::string head = atom();
        Pattern p;
        if (head == "nondet") {
            p.kind = Pattern::Kind::Nondet;
        } else {
            auto op = parse_op_name(head);
            if (!op) {
                fail("unknown operator '" + head + "'");
            }
            p.kind = Pattern::Kind::Op;
            p.op = *op;
        }
        for (;;) {
            skip();
            if (i_ >= s_.size()) {
                fail("missing ')'");
            }
            if (s_[i_] == ')') {
                ++i_;
                break;
            }
            p.args.push_back(node());
        }
        if (p.kind == Pattern::Kind::Nondet && p.args.size() != 2) {
            fail("nondet expects 2 arguments");
        }
        if (p.kind == Pattern::Kind::Op && p.op.arity() >= 0 && p.args.size() != static_cast<std::size_t>(p.op.arity())) {
            fail(head + " expects " + std::to_string(p.op.arity()) + " arguments");
        }
        return p;
    }
};

}  // namespace

Pattern Pattern::parse(std::string_view text) { return PatternReader(text).read(); }

std::string Pattern::str() const {
    switch (kind) {
    case Kind::Hole: return "?" + hole + (hole_sort ? "@" + hole_sort->str() : "");
    case Kind::Int: return value.str();
    case Kind::Bool: return value != 0 ? "true" : "false";
    case Kind::Op:
    case Kind::Nondet: {
        std::string s = "(" + (kind == Kind::Nondet ? std::string("nondet") : op.name());
        for (const auto& a : args) {
            s += " " + a.str();
        }
        return s + ")";
    }
    }
    return "?";
}

std::size_t Pattern::size() const {
    if (kind == Kind::Hole) {
        return 0;
    }
    std::size_t n = 1;
    for (const auto& a : args) {
        n += a.size();
    }
    return n;
}

void Pattern::holes(std::map<std::string, std::optional<Sort>>& out) const {
    if (kind == Kind::Hole) {
        auto& s = out[hole];
        if (!s) {
            s = hole_sort;
        }
    }
    for (const auto& a : args) {
        a.holes(out);
    }
}

// ---------------------------------------------------------------------------
// Pattern rules

namespace {

using Binding = std::map<std::string, Var>;

bool match(Rewriter& rw, const Pattern& p, const Var& v, Binding& b, unsigned depth) {
    switch (p.kind) {
    case Pattern::Kind::Hole: {
        if (p.hole_sort && !(v.sort() == *p.hole_sort)) {
            return false;
        }
        auto [it, fresh] = b.emplace(p.hole, v);
        return fresh || it->second == v;
    }
    case Pattern::Kind::Int: {
        auto k = rw.int_literal(v);
        return k && *k == p.value;
    }
    case Pattern::Kind::Bool: {
        const Rhs* r = rw.view(v);
        const auto* o = r != nullptr ? std::get_if<OpRhs>(r) : nullptr;
        return o != nullptr && o->op.kind == OpKind::BoolConst && o->op.value == p.value;
    }
    case Pattern::Kind::Op:
    case Pattern::Kind::Nondet: {
        if (depth >= kMatchDepthLimit) {
            return false;
        }
        const Rhs* r = rw.view(v);
        if (r == nullptr) {
            return false;
        }
        if (p.kind == Pattern::Kind::Nondet) {
            const auto* n = std::get_if<NondetRhs>(r);
            return n != nullptr && match(rw, p.args[0], n->a, b, depth + 1) && match(rw, p.args[1], n->b, b, depth + 1);
        }
        const auto* o = std::get_if<OpRhs>(r);
        if (o == nullptr || !(o->op == p.op) || o->args.size() != p.args.size()) {
            return false;
        }
        for (std::size_t i = 0; i < p.args.size(); ++i) {
            if (!match(rw, p.args[i], o->args[i], b, depth + 1)) {
                return false;
            }
        }
        return true;
    }
    }
    return false;
}

std::optional<Sort> infer(const Pattern& p, const std::map<std::string, Sort>& holes) {
    switch (p.kind) {
    case Pattern::Kind::Hole: {
        auto it = holes.find(p.hole);
        return it == holes.end() ? std::nullopt : std::optional<Sort>(it->second);
    }
    case Pattern::Kind::Int: return Sort::integer();
    case Pattern::Kind::Bool: return Sort::boolean();
    case Pattern::Kind::Nondet: {
        auto a = infer(p.args[0], holes);
        auto b = infer(p.args[1], holes);
        return a && b && *a == *b ? a : std::nullopt;
    }
    case Pattern::Kind::Op: {
        std::vector<Sort> args;
        for (const auto& a : p.args) {
            auto s = infer(a, holes);
            if (!s) {
                return std::nullopt;
            }
            args.push_back(*s);
        }
        try {
            return p.op.result_sort(args);
        } catch (const Error&) {
            return std::nullopt;
        }
    }
    }
    return std::nullopt;
}

Var instantiate(Rewriter& rw, const Pattern& p, const Binding& b) {
    switch (p.kind) {
    case Pattern::Kind::Hole: return b.at(p.hole);
    case Pattern::Kind::Int: return rw.emit_int(p.value);
    case Pattern::Kind::Bool: return rw.emit_bool(p.value != 0);
    case Pattern::Kind::Nondet: {
        Var x = instantiate(rw, p.args[0], b);
        Var y = instantiate(rw, p.args[1], b);
        return rw.emit(NondetRhs{x, y}, x.sort());
    }
    case Pattern::Kind::Op: {
        std::vector<Var> args;
        std::vector<Sort> sorts;
        for (const auto& a : p.args) {
            args.push_back(instantiate(rw, a, b));
            sorts.push_back(args.back().sort());
        }
        Sort s = p.op.result_sort(sorts);
        return rw.emit(OpRhs{p.op, std::move(args)}, s);
    }
    }
    throw Error("unreachable pattern kind");
}

// Matches the root against a candidate definition that has not been
// emitted yet.
std::optional<Binding> match_root(Rewriter& rw, const Pattern& p, const Rhs& rhs, const Sort& sort) {
    Binding b;
    if (p.kind == Pattern::Kind::Nondet) {
        const auto* n = std::get_if<NondetRhs>(&rhs);
        if (n != nullptr && match(rw, p.args[0], n->a, b, 1) && match(rw, p.args[1], n->b, b, 1)) {
            return b;
        }
        return std::nullopt;
    }
    const auto* o = std::get_if<OpRhs>(&rhs);
    if (o == nullptr || !(o->op == p.op) || o->args.size() != p.args.size()) {
        return std::nullopt;
    }
    for (std::size_t i = 0; i < p.args.size(); ++i) {
        if (!match(rw, p.args[i], o->args[i], b, 1)) {
            return std::nullopt;
        }
    }
    (void)sort;
    return b;
}

}  // namespace

RewriteRule pattern_rule(std::string name, RuleKind kind, std::string_view lhs_text, std::string_view rhs_text) {
    Pattern lhs = Pattern::parse(lhs_text);
    Pattern rhs = Pattern::parse(rhs_text);
    if (lhs.kind != Pattern::Kind::Op && lhs.kind != Pattern::Kind::Nondet) {
        throw Error("rule " + name + ": left-hand side must be an operation");
    }
    std::map<std::string, std::optional<Sort>> lh;
    std::map<std::string, std::optional<Sort>> rh;
    lhs.holes(lh);
    rhs.holes(rh);
    for (const auto& [h, s] : rh) {
        if (!lh.contains(h)) {
            throw Error("rule " + name + ": ?" + h + " does not occur on the left");
        }
    }
    RewriteRule r;
    r.name = std::move(name);
    r.kind = kind;
    r.text = lhs.str() + " => " + rhs.str();
    r.schemas.push_back({lhs, rhs});
    r.apply = [lhs, rhs](Rewriter& rw, const Rhs& cand, const Sort& sort) -> std::optional<Var> {
        auto b = match_root(rw, lhs, cand, sort);
        if (!b) {
            return std::nullopt;
        }
        std::map<std::string, Sort> sorts;
        for (const auto& [h, v] : *b) {
            sorts.emplace(h, v.sort());
        }
        auto s = infer(rhs, sorts);
        if (!s || !(*s == sort)) {
            return std::nullopt;
        }
        return instantiate(rw, rhs, *b);
    };
    return r;
}

// ---------------------------------------------------------------------------
// Shipped rules

namespace {

const OpRhs* op_view(Rewriter& rw, const Var& v, OpKind k) {
    const Rhs* r = rw.view(v);
    const auto* o = r != nullptr ? std::get_if<OpRhs>(r) : nullptr;
    return o != nullptr && o->op.kind == k ? o : nullptr;
}

const OpRhs* as_op(const Rhs& rhs, OpKind k) {
    const auto* o = std::get_if<OpRhs>(&rhs);
    return o != nullptr && o->op.kind == k ? o : nullptr;
}

RuleSchema schema(std::string_view l, std::string_view r) { return {Pattern::parse(l), Pattern::parse(r)}; }

// Component i of t when every way of building t agrees on it.
std::optional<Var> resolve_get(Rewriter& rw, unsigned i, const Var& t, unsigned depth) {
    if (depth >= kMatchDepthLimit) {
        return std::nullopt;
    }
    const Rhs* r = rw.view(t);
    if (r == nullptr) {
        return std::nullopt;
    }
    if (const auto* mk = as_op(*r, OpKind::Mk)) {
        if (i >= mk->args.size()) {
            return std::nullopt;
        }
        const Var& x = mk->args[i];
        for (std::size_t j = 0; j < mk->args.size(); ++j) {
            if (j != i && !rw.dead_implies(mk->args[j], x)) {
                return std::nullopt;
            }
        }
        return x;
    }
    if (const auto* n = std::get_if<NondetRhs>(r)) {
        auto a = resolve_get(rw, i, n->a, depth + 1);
        auto b = resolve_get(rw, i, n->b, depth + 1);
        if (a && b && *a == *b) {
            return a;
        }
    }
    return std::nullopt;
}

void flatten_add(Rewriter& rw, const Var& v, unsigned depth, std::vector<Var>& leaves) {
    if (depth < kMatchDepthLimit) {
        if (const auto* o = op_view(rw, v, OpKind::Add)) {
            flatten_add(rw, o->args[0], depth + 1, leaves);
            flatten_add(rw, o->args[1], depth + 1, leaves);
            return;
        }
    }
    leaves.push_back(v);
}

bool dead_implies_subst(const Subst& s, const std::string& y, const std::string& x) {
    return !s.at(y).is_bottom() || s.at(x).is_bottom();
}

RewriteRule native(std::string name, RuleKind kind, std::string text,
                   std::function<std::optional<Var>(Rewriter&, const Rhs&, const Sort&)> fn,
                   std::vector<RuleSchema> schemas) {
    RewriteRule r;
    r.name = std::move(name);
    r.kind = kind;
    r.text = std::move(text);
    r.apply = std::move(fn);
    r.schemas = std::move(schemas);
    return r;
}

}  // namespace

std::vector<RewriteRule> RuleSet::all() const {
    std::vector<RewriteRule> out = exact;
    out.insert(out.end(), approx.begin(), approx.end());
    return out;
}

RuleSet default_rulesets() {
    RuleSet rs;
    auto& ex = rs.exact;

    ex.push_back(native(
        "concat-extracts", RuleKind::Exact, "(concat (extract.a.b ?x) (extract.b-1.c ?x)) => (extract.a.c ?x)",
        [](Rewriter& rw, const Rhs& rhs, const Sort& sort) -> std::optional<Var> {
            const auto* c = as_op(rhs, OpKind::Concat);
            if (c == nullptr) {
                return std::nullopt;
            }
            const auto* hi = op_view(rw, c->args[0], OpKind::Extract);
            const auto* lo = op_view(rw, c->args[1], OpKind::Extract);
            if (hi == nullptr || lo == nullptr || !(hi->args[0] == lo->args[0]) || hi->op.b != lo->op.a + 1) {
                return std::nullopt;
            }
            return rw.emit(OpRhs{TheoryOp::extract(hi->op.a, lo->op.b), {hi->args[0]}}, sort);
        },
        {schema("(concat (extract.3.2 ?x@bv4) (extract.1.0 ?x@bv4))", "(extract.3.0 ?x@bv4)"),
         schema("(concat (extract.2.1 ?x@bv4) (extract.0.0 ?x@bv4))", "(extract.2.0 ?x@bv4)")}));

    ex.push_back(native(
        "full-extract", RuleKind::Exact, "(extract.w-1.0 ?x) => ?x when ?x has width w",
        [](Rewriter&, const Rhs& rhs, const Sort&) -> std::optional<Var> {
            const auto* e = as_op(rhs, OpKind::Extract);
            if (e == nullptr || e->op.b != 0 || e->op.a + 1 != e->args[0].sort().width()) {
                return std::nullopt;
            }
            return e->args[0];
        },
        {schema("(extract.3.0 ?x@bv4)", "?x@bv4")}));

    ex.push_back(native(
        "extract-compose", RuleKind::Exact, "(extract.c.d (extract.a.b ?x)) => (extract.c+b.d+b ?x)",
        [](Rewriter& rw, const Rhs& rhs, const Sort& sort) -> std::optional<Var> {
            const auto* e = as_op(rhs, OpKind::Extract);
            const auto* inner = e != nullptr ? op_view(rw, e->args[0], OpKind::Extract) : nullptr;
            if (inner == nullptr) {
                return std::nullopt;
            }
            const unsigned b = inner->op.b;
            return rw.emit(OpRhs{TheoryOp::extract(e->op.a + b, e->op.b + b), {inner->args[0]}}, sort);
        },
        {schema("(extract.1.0 (extract.3.1 ?x@bv4))", "(extract.2.1 ?x@bv4)")}));

    ex.push_back(pattern_rule("nondet-same", RuleKind::Exact, "(nondet ?x ?x)", "?x"));

    {
        RewriteRule r = native(
            "eq-same", RuleKind::Exact, "(eq ?x ?x) => true when ?x is never dead",
            [](Rewriter& rw, const Rhs& rhs, const Sort&) -> std::optional<Var> {
                const auto* e = as_op(rhs, OpKind::Eq);
                if (e == nullptr || !(e->args[0] == e->args[1]) || !rw.never_dead(e->args[0])) {
                    return std::nullopt;
                }
                return rw.emit_bool(true);
            },
            {schema("(eq ?x@int ?x@int)", "true"), schema("(eq ?x@bv4 ?x@bv4)", "true")});
        r.admissible = [](const Subst& s) { return !s.at("x").is_bottom(); };
        ex.push_back(std::move(r));
    }

    ex.push_back(pattern_rule("and-same", RuleKind::Exact, "(and ?x ?x)", "?x"));
    ex.push_back(pattern_rule("mul-one-left", RuleKind::Exact, "(mul 1 ?x)", "?x"));
    ex.push_back(pattern_rule("mul-one-right", RuleKind::Exact, "(mul ?x 1)", "?x"));

    ex.push_back(native(
        "add-fold", RuleKind::Exact, "k1 + ?x + k2 => ?x + (k1+k2)",
        [](Rewriter& rw, const Rhs& rhs, const Sort&) -> std::optional<Var> {
            const auto* a = as_op(rhs, OpKind::Add);
            if (a == nullptr) {
                return std::nullopt;
            }
            std::vector<Var> leaves;
            flatten_add(rw, a->args[0], 1, leaves);
            flatten_add(rw, a->args[1], 1, leaves);
            Integer sum = 0;
            std::size_t lits = 0;
            std::vector<Var> rest;
            for (const auto& v : leaves) {
                if (auto k = rw.int_literal(v)) {
                    sum += *k;
                    ++lits;
                } else {
                    rest.push_back(v);
                }
            }
            if (lits < 2) {
                return std::nullopt;
            }
            if (rest.empty()) {
                return rw.emit_int(sum);
            }
            Var acc = rest[0];
            for (std::size_t i = 1; i < rest.size(); ++i) {
                acc = rw.emit(OpRhs{TheoryOp::simple(OpKind::Add), {acc, rest[i]}}, Sort::integer());
            }
            return rw.emit(OpRhs{TheoryOp::simple(OpKind::Add), {acc, rw.emit_int(sum)}}, Sort::integer());
        },
        {schema("(add (add 2 ?x@int) 3)", "(add ?x@int 5)"), schema("(add 2 (add ?x@int -3))", "(add ?x@int -1)"),
         schema("(add 2 3)", "5")}));

    {
        RewriteRule r = native(
            "get-mk", RuleKind::Exact, "(get.i (mk ... ?x ...)) => ?x when the other components die only with ?x",
            [](Rewriter& rw, const Rhs& rhs, const Sort&) -> std::optional<Var> {
                const auto* g = as_op(rhs, OpKind::Get);
                if (g == nullptr || op_view(rw, g->args[0], OpKind::Mk) == nullptr) {
                    return std::nullopt;
                }
                return resolve_get(rw, g->op.a, g->args[0], 1);
            },
            {schema("(get.0 (mk ?a@int ?b@int))", "?a@int"), schema("(get.1 (mk ?b@bool ?a@int))", "?a@int")});
        r.admissible = [](const Subst& s) { return dead_implies_subst(s, "b", "a"); };
        ex.push_back(std::move(r));
    }

    {
        RewriteRule r = native(
            "get-nondet", RuleKind::Exact, "(get.i (nondet ?s ?t)) => ?x when get.i of both sides is ?x",
            [](Rewriter& rw, const Rhs& rhs, const Sort&) -> std::optional<Var> {
                const auto* g = as_op(rhs, OpKind::Get);
                if (g == nullptr) {
                    return std::nullopt;
                }
                const Rhs* t = rw.view(g->args[0]);
                if (t == nullptr || !std::holds_alternative<NondetRhs>(*t)) {
                    return std::nullopt;
                }
                return resolve_get(rw, g->op.a, g->args[0], 1);
            },
            {schema("(get.0 (nondet (mk ?a@int ?b@bool) (mk ?a@int ?c@bool)))", "?a@int")});
        r.admissible = [](const Subst& s) {
            return dead_implies_subst(s, "b", "a") && dead_implies_subst(s, "c", "a");
        };
        ex.push_back(std::move(r));
    }

    rs.approx.push_back(pattern_rule("mul-zero-left", RuleKind::Approx, "(mul 0 ?x)", "0"));
    rs.approx.push_back(pattern_rule("mul-zero-right", RuleKind::Approx, "(mul ?x 0)", "0"));
    rs.approx.push_back(pattern_rule("sub-same", RuleKind::Approx, "(sub ?x ?x)", "0"));
    rs.approx.push_back(pattern_rule("div-same", RuleKind::Approx, "(div ?x ?x)", "1"));
    return rs;
}

std::vector<RewriteRule> aggressive_rules() {
    return {pattern_rule("inv-lt-two", RuleKind::Approx, "(lt (div 1 ?x) 2)", "true")};
}

std::vector<RewriteRule> parse_rule_file(std::string_view text) {
    std::vector<RewriteRule> out;
    std::size_t lineno = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto c = line.find(';'); c != std::string::npos) {
            line.resize(c);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        const std::string where = "rules:" + std::to_string(lineno);
        auto arrow = line.find("=>");
        if (arrow == std::string::npos) {
            throw Error(where + ": expected 'lhs => rhs [exact|approx]'");
        }
        std::string lhs = line.substr(0, arrow);
        std::string rhs = line.substr(arrow + 2);
        RuleKind kind = RuleKind::Exact;
        auto last = rhs.find_last_not_of(" \t\r");
        rhs.resize(last + 1);
        for (const auto& [word, k] : {std::pair{"exact", RuleKind::Exact}, std::pair{"approx", RuleKind::Approx}}) {
            const std::string w = word;
            if (rhs.size() > w.size() && rhs.ends_with(w) &&
                std::isspace(static_cast<unsigned char>(rhs[rhs.size() - w.size() - 1]))) {
                kind = k;
                rhs.resize(rhs.size() - w.size());
            }
        }
        try {
            out.push_back(pattern_rule(where, kind, lhs, rhs));
        } catch (const Error& e) {
            throw Error(where + ": " + e.what());
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Validity checking

namespace {

std::vector<Value> small_values(const Sort& s) {
    std::vector<Value> out;
    if (s.is_bool()) {
        out = {Value::boolean(false), Value::boolean(true)};
    } else if (s.is_int()) {
        for (int z = -3; z <= 3; ++z) {
            out.push_back(Value::integer(z));
        }
    } else if (s.is_bitvec() && s.width() <= 4) {
        for (unsigned z = 0; z < (1U << s.width()); ++z) {
            out.push_back(Value::bitvec(s.width(), z));
        }
    } else {
        throw Error("rule check: unsupported hole sort " + s.str());
    }
    out.push_back(Value::bottom());
    return out;
}

TheoryOp literal_of(const Value& v, const Sort& s) {
    if (s.is_bool()) {
        return TheoryOp::bool_const(!v.is_bottom() && v.as_bool());
    }
    if (s.is_int()) {
        return TheoryOp::int_const(v.is_bottom() ? Integer(0) : v.as_int());
    }
    return TheoryOp::bv_const(s.width(), v.is_bottom() ? Integer(0) : v.bits());
}

class Instance {
  public:
    Instance(const std::map<std::string, Sort>& sorts, const Subst& subst) {
        for (const auto& [h, s] : sorts) {
            const Value& v = subst.at(h);
            Var lit = b_.op(fresh(), literal_of(v, s), {});
            if (v.is_bottom()) {
                Var f = b_.lit_bool(fresh(), false);
                lit = b_.assume(fresh(), f, lit);
            }
            holes_.emplace(h, lit);
        }
    }

    std::set<Value> eval(const Pattern& p) {
        Var r = build(p);
        return result_values(b_.term(r), EnumBudget{});
    }

  private:
    Builder b_;
    std::map<std::string, Var> holes_;
    int n_ = 0;

    std::string fresh() { return "p" + std::to_string(n_++); }

    Var build(const Pattern& p) {
        switch (p.kind) {
        case Pattern::Kind::Hole: return holes_.at(p.hole);
        case Pattern::Kind::Int: return b_.lit_int(fresh(), p.value);
        case Pattern::Kind::Bool: return b_.lit_bool(fresh(), p.value != 0);
        case Pattern::Kind::Nondet: {
            Var x = build(p.args[0]);
            return b_.nondet(fresh(), x, build(p.args[1]));
        }
        case Pattern::Kind::Op: {
            std::vector<Var> args;
            for (const auto& a : p.args) {
                args.push_back(build(a));
            }
            return b_.op(fresh(), p.op, std::move(args));
        }
        }
        throw Error("unreachable pattern kind");
    }
};

std::string subst_str(const Subst& s) {
    std::string out = "{";
    for (const auto& [h, v] : s) {
        out += (out.size() > 1 ? ", ?" : "?") + h + "=" + v.str();
    }
    return out + "}";
}

std::string values_str(const std::set<Value>& vs) {
    std::string out = "{";
    for (const auto& v : vs) {
        out += (out.size() > 1 ? ", " : "") + v.str();
    }
    return out + "}";
}

// Every assignment of candidate sorts to unsorted holes.
std::vector<std::map<std::string, Sort>> sortings(const std::map<std::string, std::optional<Sort>>& holes) {
    std::vector<std::map<std::string, Sort>> out{{}};
    const std::vector<Sort> candidates{Sort::integer(), Sort::boolean(), Sort::bitvec(4)};
    for (const auto& [h, s] : holes) {
        std::vector<std::map<std::string, Sort>> next;
        for (const auto& m : out) {
            if (s) {
                auto c = m;
                c.emplace(h, *s);
                next.push_back(std::move(c));
            } else {
                for (const auto& cand : candidates) {
                    auto c = m;
                    c.emplace(h, cand);
                    next.push_back(std::move(c));
                }
            }
        }
        out = std::move(next);
    }
    return out;
}

}  // namespace

RuleCheck check_rule(const RewriteRule& rule) {
    RuleCheck out;
    if (rule.schemas.empty()) {
        out.valid = false;
        out.counterexample = "rule has no schema to check";
        return out;
    }
    for (const auto& sc : rule.schemas) {
        std::map<std::string, std::optional<Sort>> holes;
        sc.lhs.holes(holes);
        sc.rhs.holes(holes);
        bool typed = false;
        for (const auto& sorts : sortings(holes)) {
            auto ls = infer(sc.lhs, sorts);
            auto rs = infer(sc.rhs, sorts);
            if (!ls || !rs || !(*ls == *rs)) {
                continue;
            }
            typed = true;
            // Odometer over hole values.
            std::vector<std::string> names;
            std::vector<std::vector<Value>> domains;
            for (const auto& [h, s] : sorts) {
                names.push_back(h);
                domains.push_back(small_values(s));
            }
            std::vector<std::size_t> idx(names.size(), 0);
            for (;;) {
                Subst sub;
                for (std::size_t i = 0; i < names.size(); ++i) {
                    sub.emplace(names[i], domains[i][idx[i]]);
                }
                if (!rule.admissible || rule.admissible(sub)) {
                    Instance inst(sorts, sub);
                    auto l = inst.eval(sc.lhs);
                    auto r = inst.eval(sc.rhs);
                    const bool ok = rule.kind == RuleKind::Exact ? l == r : (l.contains(Value::bottom()) || l == r);
                    if (!ok) {
                        out.valid = false;
                        out.counterexample = sc.lhs.str() + " => " + sc.rhs.str() + " at " + subst_str(sub) +
                                             ": " + values_str(l) + " vs " + values_str(r);
                        return out;
                    }
                }
                std::size_t k = 0;
                while (k < idx.size() && ++idx[k] == domains[k].size()) {
                    idx[k++] = 0;
                }
                if (k == idx.size()) {
                    break;
                }
            }
        }
        if (!typed) {
            out.valid = false;
            out.counterexample = sc.lhs.str() + " => " + sc.rhs.str() + " has no well-sorted instance";
            return out;
        }
    }
    return out;
}

}  // namespace laf
