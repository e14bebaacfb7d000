// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/text.hpp"

#include <cctype>
#include <charconv>
#include <unordered_map>
#include <unordered_set>

namespace laf {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& msg)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg), line_(line), column_(column) {}

namespace {

struct Token {
    enum class Kind { Open, Close, Atom, End } kind;
    std::string text;
    std::size_t line;
    std::size_t col;
};

std::vector<Token> tokenize(std::string_view s) {
    std::vector<Token> out;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t i = 0;
    auto advance = [&] {
        if (s[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
        ++i;
    };
    while (i < s.size()) {
        const char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance();
        } else if (c == ';') {
            while (i < s.size() && s[i] != '\n') {
                advance();
            }
        } else if (c == '(' || c == ')') {
            out.push_back({c == '(' ? Token::Kind::Open : Token::Kind::Close, std::string(1, c), line, col});
            advance();
        } else {
            Token t{Token::Kind::Atom, {}, line, col};
            while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '(' && s[i] != ')' &&
                   s[i] != ';') {
                t.text += s[i];
                advance();
            }
            out.push_back(std::move(t));
        }
    }
    out.push_back({Token::Kind::End, "end of input", line, col});
    return out;
}

bool parse_unsigned(std::string_view s, unsigned& out) {
    if (s.empty()) {
        return false;
    }
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
}

bool parse_integer(std::string_view s, Integer& out) {
    std::size_t i = 0;
    bool neg = false;
    if (!s.empty() && s[0] == '-') {
        neg = true;
        i = 1;
    }
    if (i == s.size()) {
        return false;
    }
    Integer v = 0;
    for (; i < s.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
            return false;
        }
        v = v * 10 + (s[i] - '0');
    }
    out = neg ? Integer(-v) : v;
    return true;
}

const std::unordered_map<std::string_view, OpKind>& simple_ops() {
    static const std::unordered_map<std::string_view, OpKind> ops = {
        {"add", OpKind::Add}, {"sub", OpKind::Sub}, {"neg", OpKind::Neg}, {"mul", OpKind::Mul},
        {"div", OpKind::Div}, {"lt", OpKind::Lt},   {"le", OpKind::Le},   {"eq", OpKind::Eq},
        {"and", OpKind::And}, {"or", OpKind::Or},   {"not", OpKind::Not}, {"mk", OpKind::Mk},
        {"concat", OpKind::Concat},
    };
    return ops;
}

class Parser {
  public:
    explicit Parser(std::string_view text) : toks_(tokenize(text)) {}

    Term term() {
        scopes_.emplace_back();
        std::vector<Def> defs;
        while (peek_open_keyword("let")) {
            defs.push_back(def());
        }
        expect_open();
        expect_keyword("in");
        Var result = lookup(next_atom("result variable"));
        expect_close();
        if (peek().kind != Token::Kind::End) {
            fail(peek(), "trailing input after (in ...)");
        }
        return Term{Context(std::move(defs)), result};
    }

  private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    VarPool pool_;
    std::vector<std::unordered_map<std::string, Var>> scopes_;
    std::unordered_set<std::string> names_;

    [[noreturn]] static void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

    const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
    const Token& take() {
        const Token& t = peek();
        if (t.kind != Token::Kind::End) {
            ++pos_;
        }
        return t;
    }

    bool peek_open_keyword(std::string_view kw) const {
        return peek().kind == Token::Kind::Open && peek(1).kind == Token::Kind::Atom && peek(1).text == kw;
    }

    void expect_open() {
        if (peek().kind != Token::Kind::Open) {
            fail(peek(), "expected '(' but found '" + peek().text + "'");
        }
        take();
    }
    void expect_close() {
        if (peek().kind != Token::Kind::Close) {
            fail(peek(), "expected ')' but found '" + peek().text + "'");
        }
        take();
    }
    void expect_keyword(std::string_view kw) {
        const Token& t = take();
        if (t.kind != Token::Kind::Atom || t.text != kw) {
            fail(t, "expected '" + std::string(kw) + "' but found '" + t.text + "'");
        }
    }
    const Token& next_atom(const char* what) {
        const Token& t = take();
        if (t.kind != Token::Kind::Atom) {
            fail(t, std::string("expected ") + what + " but found '" + t.text + "'");
        }
        return t;
    }

    Var lookup(const Token& t) {
        for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
            auto f = it->find(t.text);
            if (f != it->end()) {
                return f->second;
            }
        }
        fail(t, "variable '" + t.text + "' is not in scope");
    }

    void declare_name(const Token& t) {
        if (!names_.insert(t.text).second) {
            fail(t, "duplicate binder '" + t.text + "'");
        }
    }

    Var bind(const Token& t, const Sort& s) {
        Var v = pool_.fresh(t.text, s);
        scopes_.back().emplace(t.text, v);
        return v;
    }

    Sort sort() {
        const Token& t = take();
        if (t.kind == Token::Kind::Atom) {
            if (t.text == "bool") {
                return Sort::boolean();
            }
            if (t.text == "int") {
                return Sort::integer();
            }
            fail(t, "unknown sort '" + t.text + "'");
        }
        if (t.kind != Token::Kind::Open) {
            fail(t, "expected a sort");
        }
        const Token& head = next_atom("sort constructor");
        if (head.text == "bv") {
            const Token& w = next_atom("bitvector width");
            unsigned width = 0;
            if (!parse_unsigned(w.text, width) || width == 0 || width > 64) {
                fail(w, "bitvector width must be an integer in [1, 64]");
            }
            expect_close();
            return Sort::bitvec(width);
        }
        if (head.text == "tuple") {
            std::vector<Sort> elems;
            while (peek().kind != Token::Kind::Close) {
                elems.push_back(sort());
            }
            if (elems.empty()) {
                fail(head, "tuple sort needs at least one element");
            }
            expect_close();
            return Sort::tuple(std::move(elems));
        }
        fail(head, "unknown sort constructor '" + head.text + "'");
    }

    TheoryOp literal(const Token& t, const Sort& s) {
        if (s.is_bool()) {
            if (t.text == "true" || t.text == "false") {
                return TheoryOp::bool_const(t.text == "true");
            }
            fail(t, "expected a boolean literal");
        }
        if (s.is_int()) {
            Integer v;
            if (!parse_integer(t.text, v)) {
                fail(t, "expected an integer literal");
            }
            return TheoryOp::int_const(std::move(v));
        }
        if (s.is_bitvec()) {
            Integer v = 0;
            const std::string& x = t.text;
            bool ok = true;
            if (x.size() > 2 && x[0] == '#' && (x[1] == 'x' || x[1] == 'b')) {
                const int base = x[1] == 'x' ? 16 : 2;
                for (std::size_t i = 2; i < x.size() && ok; ++i) {
                    const int d = std::isdigit(static_cast<unsigned char>(x[i])) ? x[i] - '0'
                                  : std::isxdigit(static_cast<unsigned char>(x[i]))
                                      ? std::tolower(static_cast<unsigned char>(x[i])) - 'a' + 10
                                      : 99;
                    ok = d < base;
                    v = v * base + d;
                }
            } else {
                ok = parse_integer(x, v) && v >= 0;
            }
            if (!ok) {
                fail(t, "expected a bitvector literal");
            }
            if (v >= (Integer(1) << s.width())) {
                fail(t, "literal does not fit in " + s.str());
            }
            return TheoryOp::bv_const(s.width(), v);
        }
        fail(t, "tuple-sorted literals are not supported; use mk");
    }

    TheoryOp opname(const Token& t) {
        if (auto op = parse_op_name(t.text)) {
            return *op;
        }
        fail(t, "unknown operator '" + t.text + "'");
    }

    void check_sort(const Token& at, const Var& v, const Sort& s, const char* what) {
        if (!(v.sort() == s)) {
            fail(at, std::string(what) + " '" + v.name() + "' has sort " + v.sort().str() + ", expected " + s.str());
        }
    }

    Def def() {
        take();
        take();  // let
        const Token& name = next_atom("variable name");
        declare_name(name);
        Sort s = sort();
        const Token& start = peek();
        Rhs rhs;
        if (start.kind == Token::Kind::Atom) {
            rhs = OpRhs{literal(take(), s), {}};
        } else {
            expect_open();
            const Token& head = next_atom("operator");
            if (head.text == "nondet" || head.text == "assume") {
                std::vector<Var> args;
                while (peek().kind == Token::Kind::Atom) {
                    const Token& at = take();
                    args.push_back(lookup(at));
                }
                if (args.size() != 2) {
                    fail(head, head.text + " expects 2 arguments, got " + std::to_string(args.size()));
                }
                expect_close();
                if (head.text == "nondet") {
                    check_sort(head, args[0], s, "nondet argument");
                    check_sort(head, args[1], s, "nondet argument");
                    rhs = NondetRhs{args[0], args[1]};
                } else {
                    check_sort(head, args[0], Sort::boolean(), "assume condition");
                    check_sort(head, args[1], s, "assume value");
                    rhs = AssumeRhs{args[0], args[1]};
                }
            } else if (head.text == "unknown") {
                expect_close();
                rhs = UnknownRhs{};
            } else if (head.text == "mu") {
                rhs = mu(s);
            } else {
                TheoryOp op = opname(head);
                std::vector<Var> args;
                std::vector<Sort> sorts;
                while (peek().kind == Token::Kind::Atom) {
                    args.push_back(lookup(take()));
                    sorts.push_back(args.back().sort());
                }
                expect_close();
                if (op.arity() >= 0 && static_cast<int>(args.size()) != op.arity()) {
                    fail(head, op.name() + " expects " + std::to_string(op.arity()) + " argument(s), got " +
                                   std::to_string(args.size()));
                }
                Sort r;
                try {
                    r = op.result_sort(sorts);
                } catch (const Error& e) {
                    fail(head, e.what());
                }
                if (!(r == s)) {
                    fail(head, "'" + name.text + "' declared " + s.str() + " but " + op.name() + " yields " + r.str());
                }
                rhs = OpRhs{std::move(op), std::move(args)};
            }
        }
        expect_close();
        return Def{bind(name, s), std::move(rhs)};
    }

    MuRhs mu(const Sort& s) {
        expect_open();
        const Token& lname = next_atom("loop variable");
        declare_name(lname);
        expect_close();
        scopes_.emplace_back();
        Var loopvar = bind(lname, s);
        std::vector<Def> body;
        while (peek_open_keyword("let")) {
            body.push_back(def());
        }
        const Token& exit_tok = next_atom("mu exit variable");
        Var exit = lookup(exit_tok);
        check_sort(exit_tok, exit, s, "mu exit");
        scopes_.pop_back();
        const Token& init_tok = next_atom("mu init variable");
        Var init = lookup(init_tok);
        check_sort(init_tok, init, s, "mu init");
        expect_close();
        return MuRhs{loopvar, Context(std::move(body)), exit, init};
    }
};

class Printer {
  public:
    explicit Printer(const Term& t) {
        std::unordered_map<std::string, int> counts;
        for_each_binder(t.ctx, [&](const Var& v) { ++counts[v.name()]; });
        for (auto& [n, c] : counts) {
            if (c > 1) {
                dup_.insert(n);
            }
        }
    }

    std::string name(const Var& v) const {
        if (dup_.contains(v.name())) {
            return v.name() + "~" + std::to_string(v.id());
        }
        return v.name();
    }

    void context(const Context& ctx, int indent, std::string& out) const {
        for (const auto& d : ctx) {
            out.append(static_cast<std::size_t>(indent), ' ');
            def(d, indent, out);
            out += '\n';
        }
    }

    void def(const Def& d, int indent, std::string& out) const {
        out += "(let " + name(d.bound) + " " + d.bound.sort().str() + " ";
        std::visit(
            [&](const auto& r) {
                using T = std::decay_t<decltype(r)>;
                if constexpr (std::is_same_v<T, OpRhs>) {
                    if (r.op.is_literal()) {
                        out += print_literal(r.op);
                    } else {
                        out += "(" + r.op.name();
                        for (const auto& a : r.args) {
                            out += " " + name(a);
                        }
                        out += ")";
                    }
                } else if constexpr (std::is_same_v<T, NondetRhs>) {
                    out += "(nondet " + name(r.a) + " " + name(r.b) + ")";
                } else if constexpr (std::is_same_v<T, AssumeRhs>) {
                    out += "(assume " + name(r.cond) + " " + name(r.val) + ")";
                } else if constexpr (std::is_same_v<T, UnknownRhs>) {
                    out += "(unknown)";
                } else {
                    out += "(mu (" + name(r.loopvar) + ")\n";
                    context(r.body, indent + 2, out);
                    out.append(static_cast<std::size_t>(indent + 2), ' ');
                    out += name(r.exit) + " " + name(r.init) + ")";
                }
            },
            d.rhs);
        out += ")";
    }

  private:
    std::unordered_set<std::string> dup_;
};

}  // namespace

Term parse_term(std::string_view text) { return Parser(text).term(); }

std::optional<TheoryOp> parse_op_name(std::string_view s) {
    const auto& ops = simple_ops();
    if (auto it = ops.find(s); it != ops.end()) {
        return TheoryOp::simple(it->second);
    }
    if (s.starts_with("get.")) {
        unsigned i = 0;
        if (parse_unsigned(s.substr(4), i)) {
            return TheoryOp::get(i);
        }
    } else if (s.starts_with("extract.")) {
        auto rest = s.substr(8);
        auto dot = rest.find('.');
        unsigned hi = 0;
        unsigned lo = 0;
        if (dot != std::string_view::npos && parse_unsigned(rest.substr(0, dot), hi) &&
            parse_unsigned(rest.substr(dot + 1), lo)) {
            return TheoryOp::extract(hi, lo);
        }
    }
    return std::nullopt;
}

std::string print_sort(const Sort& sort) { return sort.str(); }

std::string print_literal(const TheoryOp& op) {
    switch (op.kind) {
    case OpKind::BoolConst: return op.value != 0 ? "true" : "false";
    case OpKind::IntConst: return op.value.str();
    case OpKind::BvConst: {
        const unsigned w = op.a;
        std::string digits;
        if (w % 4 == 0) {
            static const char* hex = "0123456789abcdef";
            for (unsigned i = w / 4; i-- > 0;) {
                digits += hex[static_cast<unsigned>((op.value >> (4 * i)) & 15)];
            }
            return "#x" + digits;
        }
        for (unsigned i = w; i-- > 0;) {
            digits += ((op.value >> i) & 1) != 0 ? '1' : '0';
        }
        return "#b" + digits;
    }
    default: throw Error("not a literal: " + op.name());
    }
}

std::string print_term(const Term& term) {
    Printer p(term);
    std::string out;
    p.context(term.ctx, 0, out);
    out += "(in " + p.name(term.result) + ")\n";
    return out;
}

}  // namespace laf
