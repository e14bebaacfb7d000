// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/while.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <unordered_set>

#include "laf/rewrite.hpp"
#include "laf/text.hpp"

namespace laf {

namespace {

// ---------------------------------------------------------------- lexer

struct Tok {
    enum class Kind : std::uint8_t { Ident, Int, Punct, End };
    Kind kind = Kind::End;
    std::string text;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t offset = 0;
};

std::vector<Tok> lex(std::string_view src) {
    static const char* const puncts[] = {":=", "<=", ">=", "==", "!=", "&&", "||", "+", "-", "*", "/",
                                         "<",  ">",  "!",  ";",  "{",  "}",  "(",  ")"};
    std::vector<Tok> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c)) != 0) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        Tok t;
        t.line = line;
        t.col = col;
        t.offset = i;
        if (std::isalpha(static_cast<unsigned char>(c)) != 0 || c == '_') {
            std::size_t j = i;
            while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) != 0 || src[j] == '_')) {
                ++j;
            }
            t.kind = Tok::Kind::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) != 0) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j])) != 0) {
                ++j;
            }
            t.kind = Tok::Kind::Int;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else {
            const char* hit = nullptr;
            for (const char* p : puncts) {
                if (src.substr(i, std::char_traits<char>::length(p)) == p) {
                    hit = p;
                    break;
                }
            }
            if (hit == nullptr) {
                throw ParseError(line, col, std::string("unexpected character '") + c + "'");
            }
            t.kind = Tok::Kind::Punct;
            t.text = hit;
            advance(t.text.size());
        }
        out.push_back(std::move(t));
    }
    Tok end;
    end.line = line;
    end.col = col;
    end.offset = src.size();
    out.push_back(end);
    return out;
}

// --------------------------------------------------------------- parser

const std::unordered_set<std::string>& keywords() {
    static const std::unordered_set<std::string> k{"if", "else", "while", "assert", "nondet"};
    return k;
}

class Parser {
  public:
    explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    WProgram program() {
        WProgram p;
        while (peek().kind != Tok::Kind::End) {
            p.stmts.push_back(statement());
        }
        p.vars = vars_;
        return p;
    }

  private:
    std::string_view src_;
    std::vector<Tok> toks_;
    std::size_t pos_ = 0;
    std::vector<std::string> vars_;

    const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    bool is(const char* p) const { return peek().kind == Tok::Kind::Punct && peek().text == p; }
    bool is_kw(const char* k) const { return peek().kind == Tok::Kind::Ident && peek().text == k; }
    [[noreturn]] void fail(const Tok& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }
    [[noreturn]] void fail(const std::string& msg) const { fail(peek(), msg); }

    std::string describe(const Tok& t) const {
        return t.kind == Tok::Kind::End ? std::string("end of input") : "'" + t.text + "'";
    }
    void expect(const char* p) {
        if (!is(p)) {
            fail(std::string("expected '") + p + "', found " + describe(peek()));
        }
        ++pos_;
    }
    void note_var(const std::string& v) {
        if (std::find(vars_.begin(), vars_.end(), v) == vars_.end()) {
            vars_.push_back(v);
        }
    }

    WStmtP statement() {
        const Tok& t = peek();
        auto s = std::make_shared<WStmt>();
        s->line = t.line;
        if (is("{")) {
            ++pos_;
            s->kind = WStmt::Kind::Block;
            while (!is("}")) {
                if (peek().kind == Tok::Kind::End) {
                    fail("expected '}', found end of input");
                }
                s->body.push_back(statement());
            }
            ++pos_;
            return s;
        }
        if (is_kw("if")) {
            ++pos_;
            s->kind = WStmt::Kind::If;
            s->expr = condition();
            s->then_s = block();
            if (is_kw("else")) {
                ++pos_;
                s->else_s = is_kw("if") ? statement() : block();
            }
            return s;
        }
        if (is_kw("while")) {
            ++pos_;
            s->kind = WStmt::Kind::While;
            s->expr = condition();
            s->then_s = block();
            return s;
        }
        if (is_kw("assert")) {
            ++pos_;
            s->kind = WStmt::Kind::Assert;
            expect("(");
            const std::size_t from = peek().offset;
            s->expr = as_bool(expr());
            s->text = std::string(src_.substr(from, peek().offset - from));
            expect(")");
            expect(";");
            return s;
        }
        if (t.kind == Tok::Kind::Ident && keywords().count(t.text) == 0) {
            ++pos_;
            s->kind = WStmt::Kind::Assign;
            s->var = t.text;
            expect(":=");
            if (is(";")) {
                fail("expected an expression after ':='");
            }
            auto e = expr();
            if (e->is_bool) {
                fail(t, "boolean value assigned to integer variable '" + t.text + "'");
            }
            note_var(t.text);
            s->expr = e;
            expect(";");
            return s;
        }
        fail("expected a statement, found " + describe(t));
    }

    WStmtP block() {
        if (!is("{")) {
            fail("expected '{', found " + describe(peek()));
        }
        return statement();
    }

    WExprP condition() {
        expect("(");
        auto e = as_bool(expr());
        expect(")");
        return e;
    }

    static WExprP make(WExpr::Kind k, std::string op, std::vector<WExprP> args, bool is_bool, std::size_t line) {
        auto e = std::make_shared<WExpr>();
        e->kind = k;
        e->op = std::move(op);
        e->args = std::move(args);
        e->is_bool = is_bool;
        e->line = line;
        return e;
    }

    // An integer in a boolean position means "!= 0".
    static WExprP as_bool(WExprP e) {
        if (e->is_bool) {
            return e;
        }
        auto zero = std::make_shared<WExpr>();
        zero->kind = WExpr::Kind::Int;
        zero->value = 0;
        zero->line = e->line;
        const std::size_t line = e->line;
        return make(WExpr::Kind::Binary, "!=", {std::move(e), zero}, true, line);
    }

    void need_int(const WExprP& e, const Tok& at) const {
        if (e->is_bool) {
            fail(at, "boolean operand to '" + at.text + "'");
        }
    }

    WExprP expr() { return disj(); }

    WExprP disj() {
        auto l = conj();
        while (is("||")) {
            const Tok& t = peek();
            ++pos_;
            l = make(WExpr::Kind::Binary, "||", {as_bool(l), as_bool(conj())}, true, t.line);
        }
        return l;
    }

    WExprP conj() {
        auto l = comparison();
        while (is("&&")) {
            const Tok& t = peek();
            ++pos_;
            l = make(WExpr::Kind::Binary, "&&", {as_bool(l), as_bool(comparison())}, true, t.line);
        }
        return l;
    }

    WExprP comparison() {
        auto l = additive();
        for (const char* op : {"<=", ">=", "==", "!=", "<", ">"}) {
            if (is(op)) {
                const Tok t = peek();
                ++pos_;
                auto r = additive();
                const bool equality = t.text == "==" || t.text == "!=";
                if (equality) {
                    if (l->is_bool != r->is_bool) {
                        fail(t, "operands of '" + t.text + "' differ in type");
                    }
                } else {
                    need_int(l, t);
                    need_int(r, t);
                }
                return make(WExpr::Kind::Binary, t.text, {l, r}, true, t.line);
            }
        }
        return l;
    }

    WExprP additive() {
        auto l = multiplicative();
        while (is("+") || is("-")) {
            const Tok t = peek();
            ++pos_;
            auto r = multiplicative();
            need_int(l, t);
            need_int(r, t);
            l = make(WExpr::Kind::Binary, t.text, {l, r}, false, t.line);
        }
        return l;
    }

    WExprP multiplicative() {
        auto l = unary();
        while (is("*") || is("/")) {
            const Tok t = peek();
            ++pos_;
            auto r = unary();
            need_int(l, t);
            need_int(r, t);
            l = make(WExpr::Kind::Binary, t.text, {l, r}, false, t.line);
        }
        return l;
    }

    WExprP unary() {
        if (is("!")) {
            const Tok t = peek();
            ++pos_;
            return make(WExpr::Kind::Unary, "!", {as_bool(unary())}, true, t.line);
        }
        if (is("-")) {
            const Tok t = peek();
            ++pos_;
            auto a = unary();
            need_int(a, t);
            return make(WExpr::Kind::Unary, "neg", {a}, false, t.line);
        }
        return primary();
    }

    WExprP primary() {
        const Tok t = peek();
        if (t.kind == Tok::Kind::Int) {
            ++pos_;
            auto e = make(WExpr::Kind::Int, "", {}, false, t.line);
            const_cast<WExpr&>(*e).value = Integer(t.text);
            return e;
        }
        if (t.kind == Tok::Kind::Ident) {
            if (t.text == "nondet") {
                ++pos_;
                if (is("(")) {
                    ++pos_;
                    expect(")");
                }
                return make(WExpr::Kind::Nondet, "", {}, false, t.line);
            }
            if (keywords().count(t.text) != 0) {
                fail("expected an expression, found '" + t.text + "'");
            }
            ++pos_;
            note_var(t.text);
            auto e = make(WExpr::Kind::Var, "", {}, false, t.line);
            const_cast<WExpr&>(*e).name = t.text;
            return e;
        }
        if (is("(")) {
            ++pos_;
            auto e = expr();
            expect(")");
            return e;
        }
        fail("expected an expression, found " + describe(t));
    }
};

// ---------------------------------------------------------- translation

class Names {
  public:
    std::string fresh(const std::string& base) {
        if (used_.insert(base).second) {
            return base;
        }
        for (unsigned n = 2;; ++n) {
            std::string s = base + "_" + std::to_string(n);
            if (used_.insert(s).second) {
                return s;
            }
        }
    }

  private:
    std::unordered_set<std::string> used_;
};

class Translator {
  public:
    explicit Translator(const WProgram& p) : prog_(p), vars_(p.vars) {
        if (vars_.empty()) {
            vars_.emplace_back("_");
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            index_[vars_[i]] = static_cast<unsigned>(i);
        }
        std::vector<Sort> sorts(vars_.size(), Sort::integer());
        mem_sort_ = Sort::tuple(std::move(sorts));
    }

    WhileTranslation run() {
        Builder b;
        std::vector<Var> init;
        for (const auto& v : vars_) {
            init.push_back(b.unknown(names_.fresh(v + "0"), Sort::integer()));
        }
        Var m = b.op(mem(), TheoryOp::simple(OpKind::Mk), init);
        for (const auto& s : prog_.stmts) {
            m = stmt(b, *s, m);
        }
        WhileTranslation out;
        out.term = b.term(m);
        out.asserts = std::move(asserts_);
        out.vars = vars_;
        return out;
    }

  private:
    const WProgram& prog_;
    std::vector<std::string> vars_;
    std::map<std::string, unsigned> index_;
    Sort mem_sort_ = Sort::integer();
    Names names_;
    unsigned mem_count_ = 0;
    unsigned cond_count_ = 0;
    std::vector<WhileAssertion> asserts_;

    std::string mem() { return names_.fresh("M" + std::to_string(mem_count_++)); }

    static std::string lit_name(const Integer& v) {
        return v < 0 ? "km" + Integer(-v).str() : "k" + v.str();
    }

    Var expr(Builder& b, const WExpr& e, Var m, const std::string& hint) {
        auto name = [&](const std::string& base) { return names_.fresh(hint.empty() ? base : hint); };
        switch (e.kind) {
        case WExpr::Kind::Int: return b.lit_int(name(lit_name(e.value)), e.value);
        case WExpr::Kind::Var: return b.op(name(e.name + "r"), TheoryOp::get(index_.at(e.name)), {m});
        case WExpr::Kind::Nondet: return b.unknown(name("u"), Sort::integer());
        case WExpr::Kind::Unary: {
            Var a = expr(b, *e.args[0], m, "");
            return b.unary(name("t"), e.op == "!" ? OpKind::Not : OpKind::Neg, a);
        }
        case WExpr::Kind::Binary: break;
        }
        Var l = expr(b, *e.args[0], m, "");
        Var r = expr(b, *e.args[1], m, "");
        static const std::map<std::string, OpKind> direct{
            {"+", OpKind::Add}, {"-", OpKind::Sub}, {"*", OpKind::Mul},  {"/", OpKind::Div},
            {"<", OpKind::Lt},  {"<=", OpKind::Le}, {"==", OpKind::Eq},  {"&&", OpKind::And},
            {"||", OpKind::Or}};
        if (auto it = direct.find(e.op); it != direct.end()) {
            return b.binary(name("t"), it->second, l, r);
        }
        if (e.op == ">") {
            return b.binary(name("t"), OpKind::Lt, r, l);
        }
        if (e.op == ">=") {
            return b.binary(name("t"), OpKind::Le, r, l);
        }
        // "!="
        Var eq = b.binary(names_.fresh("t"), OpKind::Eq, l, r);
        return b.unary(name("t"), OpKind::Not, eq);
    }

    // A condition "c<k>"; leading negations are named after what they negate.
    Var cond(Builder& b, const WExpr& e, Var m) {
        const std::string base = "c" + std::to_string(++cond_count_);
        std::function<Var(const WExpr&, const std::string&)> go = [&](const WExpr& x, const std::string& n) -> Var {
            if (x.kind == WExpr::Kind::Unary && x.op == "!") {
                Var inner = go(*x.args[0], n);
                return b.unary(names_.fresh("n" + inner.name()), OpKind::Not, inner);
            }
            return expr(b, x, m, n);
        };
        return go(e, base);
    }

    Var negate(Builder& b, Var c) { return b.unary(names_.fresh("n" + c.name()), OpKind::Not, c); }

    Var stmt(Builder& b, const WStmt& s, Var m) {
        switch (s.kind) {
        case WStmt::Kind::Block:
            for (const auto& c : s.body) {
                m = stmt(b, *c, m);
            }
            return m;
        case WStmt::Kind::Assign: {
            const unsigned idx = index_.at(s.var);
            Var v = expr(b, *s.expr, m, s.var);
            std::vector<Var> parts;
            for (unsigned i = 0; i < vars_.size(); ++i) {
                parts.push_back(i == idx ? v : b.op(names_.fresh(vars_[i] + "r"), TheoryOp::get(i), {m}));
            }
            return b.op(mem(), TheoryOp::simple(OpKind::Mk), parts);
        }
        case WStmt::Kind::Assert: {
            Var v = expr(b, *s.expr, m, "assert" + std::to_string(asserts_.size() + 1));
            asserts_.push_back(WhileAssertion{v.name(), v, s.line, s.text});
            return m;
        }
        case WStmt::Kind::If: {
            Var c = cond(b, *s.expr, m);
            Var nc = negate(b, c);
            Var mt = stmt(b, *s.then_s, m);
            Var me = s.else_s ? stmt(b, *s.else_s, m) : m;
            Var at = b.assume(mem(), c, mt);
            Var ae = b.assume(mem(), nc, me);
            return b.nondet(mem(), at, ae);
        }
        case WStmt::Kind::While: {
            const std::string res = mem();
            const std::string loop = mem();
            Var out = b.mu(res, loop, m, [&](Builder& body, Var lv) {
                Var c = cond(body, *s.expr, lv);
                Var entered = body.assume(mem(), c, lv);
                return stmt(body, *s.then_s, entered);
            });
            Var c = cond(b, *s.expr, out);
            Var nc = negate(b, c);
            return b.assume(mem(), nc, out);
        }
        }
        return m;
    }
};

WStmtP unroll_stmt(const WStmtP& s, unsigned n) {
    auto copy = std::make_shared<WStmt>(*s);
    switch (s->kind) {
    case WStmt::Kind::Block:
        for (auto& c : copy->body) {
            c = unroll_stmt(c, n);
        }
        return copy;
    case WStmt::Kind::If:
        copy->then_s = unroll_stmt(s->then_s, n);
        if (s->else_s) {
            copy->else_s = unroll_stmt(s->else_s, n);
        }
        return copy;
    case WStmt::Kind::While: {
        copy->then_s = unroll_stmt(s->then_s, n);
        WStmtP acc = copy;
        for (unsigned i = 0; i < n; ++i) {
            auto blk = std::make_shared<WStmt>();
            blk->kind = WStmt::Kind::Block;
            blk->line = s->line;
            blk->body = {copy->then_s, acc};
            auto peel = std::make_shared<WStmt>();
            peel->kind = WStmt::Kind::If;
            peel->line = s->line;
            peel->expr = s->expr;
            peel->then_s = blk;
            acc = peel;
        }
        return acc;
    }
    default: return copy;
    }
}

// ---------------------------------------------------------- interpreter

using Store = std::vector<Integer>;

class Interp {
  public:
    Interp(const WProgram& p, const WhileRunConfig& cfg) : cfg_(cfg) {
        for (std::size_t i = 0; i < p.vars.size(); ++i) {
            index_[p.vars[i]] = i;
        }
    }

    bool dead = false;

    // Every value of e in s; division by zero contributes nothing.
    std::vector<Integer> eval(const WExpr& e, const Store& s) {
        switch (e.kind) {
        case WExpr::Kind::Int: return {e.value};
        case WExpr::Kind::Var: return {s[index_.at(e.name)]};
        case WExpr::Kind::Nondet: {
            std::vector<Integer> out;
            for (Integer v = cfg_.lo; v <= cfg_.hi; ++v) {
                out.push_back(v);
            }
            return out;
        }
        case WExpr::Kind::Unary: {
            std::vector<Integer> out;
            for (const auto& a : eval(*e.args[0], s)) {
                out.push_back(e.op == "!" ? Integer(a == 0 ? 1 : 0) : Integer(-a));
            }
            return dedup(out);
        }
        case WExpr::Kind::Binary: break;
        }
        std::vector<Integer> out;
        const auto ls = eval(*e.args[0], s);
        const auto rs = eval(*e.args[1], s);
        for (const auto& l : ls) {
            for (const auto& r : rs) {
                const std::string& op = e.op;
                auto b = [](bool v) { return Integer(v ? 1 : 0); };
                if (op == "+") {
                    out.push_back(l + r);
                } else if (op == "-") {
                    out.push_back(l - r);
                } else if (op == "*") {
                    out.push_back(l * r);
                } else if (op == "/") {
                    if (r == 0) {
                        dead = true;
                        continue;
                    }
                    // Truncating division, as in the term semantics.
                    out.push_back(l / r);
                } else if (op == "<") {
                    out.push_back(b(l < r));
                } else if (op == "<=") {
                    out.push_back(b(l <= r));
                } else if (op == ">") {
                    out.push_back(b(l > r));
                } else if (op == ">=") {
                    out.push_back(b(l >= r));
                } else if (op == "==") {
                    out.push_back(b(l == r));
                } else if (op == "!=") {
                    out.push_back(b(l != r));
                } else if (op == "&&") {
                    out.push_back(b(l != 0 && r != 0));
                } else {
                    out.push_back(b(l != 0 || r != 0));
                }
            }
        }
        return dedup(out);
    }

    std::set<Store> exec(const WStmt& st, std::set<Store> in) {
        switch (st.kind) {
        case WStmt::Kind::Block:
            for (const auto& c : st.body) {
                in = exec(*c, std::move(in));
            }
            return in;
        case WStmt::Kind::Assert: return in;
        case WStmt::Kind::Assign: {
            std::set<Store> out;
            const std::size_t idx = index_.at(st.var);
            for (const auto& s : in) {
                for (const auto& v : eval(*st.expr, s)) {
                    Store t = s;
                    t[idx] = v;
                    out.insert(std::move(t));
                }
            }
            return out;
        }
        case WStmt::Kind::If: {
            std::set<Store> yes;
            std::set<Store> no;
            split(*st.expr, in, yes, no);
            std::set<Store> out = exec(*st.then_s, std::move(yes));
            if (st.else_s) {
                no = exec(*st.else_s, std::move(no));
            }
            out.insert(no.begin(), no.end());
            return out;
        }
        case WStmt::Kind::While: {
            std::set<Store> out;
            std::set<Store> frontier = std::move(in);
            for (std::size_t i = 0;; ++i) {
                std::set<Store> yes;
                std::set<Store> no;
                split(*st.expr, frontier, yes, no);
                out.insert(no.begin(), no.end());
                if (yes.empty()) {
                    break;
                }
                if (i == cfg_.max_iters) {
                    dead = true;
                    break;
                }
                frontier = exec(*st.then_s, std::move(yes));
            }
            return out;
        }
        }
        return in;
    }

  private:
    const WhileRunConfig& cfg_;
    std::map<std::string, std::size_t> index_;

    static std::vector<Integer> dedup(std::vector<Integer> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

    void split(const WExpr& c, const std::set<Store>& in, std::set<Store>& yes, std::set<Store>& no) {
        for (const auto& s : in) {
            for (const auto& v : eval(c, s)) {
                (v != 0 ? yes : no).insert(s);
            }
        }
    }
};

void collect_keep(const Context& ctx, const std::unordered_set<VarId>& keep, bool& found) {
    for_each_binder(ctx, [&](const Var& v) { found = found || keep.count(v.id()) != 0; });
}

std::vector<Def> prune(const Context& ctx, std::unordered_set<VarId>& live, const std::unordered_set<VarId>& keep) {
    std::vector<Def> out;
    const auto& defs = ctx.defs();
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
        const Def& d = *it;
        const bool wanted = live.count(d.bound.id()) != 0 || keep.count(d.bound.id()) != 0;
        if (const auto* mu = std::get_if<MuRhs>(&d.rhs)) {
            bool inner = false;
            collect_keep(mu->body, keep, inner);
            if (!wanted && !inner) {
                continue;
            }
            std::unordered_set<VarId> body_live = live;
            body_live.insert(mu->exit.id());
            auto body = prune(mu->body, body_live, keep);
            live.insert(body_live.begin(), body_live.end());
            live.insert(mu->init.id());
            out.push_back(Def{d.bound, MuRhs{mu->loopvar, Context(std::move(body)), mu->exit, mu->init}});
            continue;
        }
        if (!wanted) {
            continue;
        }
        std::visit(
            [&](const auto& r) {
                using R = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<R, OpRhs>) {
                    for (const auto& a : r.args) {
                        live.insert(a.id());
                    }
                } else if constexpr (std::is_same_v<R, NondetRhs>) {
                    live.insert(r.a.id());
                    live.insert(r.b.id());
                } else if constexpr (std::is_same_v<R, AssumeRhs>) {
                    live.insert(r.cond.id());
                    live.insert(r.val.id());
                }
            },
            d.rhs);
        out.push_back(d);
    }
    std::reverse(out.begin(), out.end());
    return out;
}

}  // namespace

WProgram parse_while(std::string_view text) { return Parser(text).program(); }

WProgram unroll_loops(const WProgram& p, unsigned n) {
    WProgram out;
    out.vars = p.vars;
    for (const auto& s : p.stmts) {
        out.stmts.push_back(unroll_stmt(s, n));
    }
    return out;
}

std::string expr_str(const WExpr& e) {
    switch (e.kind) {
    case WExpr::Kind::Int: return e.value.str();
    case WExpr::Kind::Var: return e.name;
    case WExpr::Kind::Nondet: return "nondet";
    case WExpr::Kind::Unary: return (e.op == "!" ? "!" : "-") + std::string("(") + expr_str(*e.args[0]) + ")";
    case WExpr::Kind::Binary: break;
    }
    return "(" + expr_str(*e.args[0]) + " " + e.op + " " + expr_str(*e.args[1]) + ")";
}

WhileTranslation translate_while(const WProgram& p) { return Translator(p).run(); }

Context eliminate_dead(const Context& ctx, const std::vector<Var>& keep) {
    std::unordered_set<VarId> k;
    for (const auto& v : keep) {
        k.insert(v.id());
    }
    std::unordered_set<VarId> live;
    return Context(prune(ctx, live, k));
}

WhileTranslation simplify_translation(const WhileTranslation& t) {
    RewriteDomain dom;
    auto s = dom.analyze(t.term);
    const auto& st = dynamic_cast<const RewriteState&>(*s);
    WhileTranslation out;
    out.vars = t.vars;
    Term raw = st.out_term(*st.image(t.term.result));
    std::vector<Var> keep{raw.result};
    for (const auto& a : t.asserts) {
        WhileAssertion na = a;
        na.var = *st.image(a.var);
        keep.push_back(na.var);
        out.asserts.push_back(std::move(na));
    }
    out.term = Term{eliminate_dead(raw.ctx, keep), raw.result};
    return out;
}

WhileRunResult run_while(const WProgram& p, const WhileRunConfig& cfg) {
    Interp in(p, cfg);
    std::set<Store> init{Store{}};
    for (std::size_t i = 0; i < p.vars.size(); ++i) {
        std::set<Store> next;
        for (const auto& s : init) {
            for (Integer v = cfg.lo; v <= cfg.hi; ++v) {
                Store t = s;
                t.push_back(v);
                next.insert(std::move(t));
            }
        }
        init = std::move(next);
    }
    WhileRunResult r;
    for (const auto& s : p.stmts) {
        init = in.exec(*s, std::move(init));
    }
    r.finals = std::move(init);
    r.some_dead = in.dead;
    return r;
}

}  // namespace laf
