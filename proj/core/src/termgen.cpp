// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/termgen.hpp"

#include <random>

namespace laf {

namespace {

class Gen {
  public:
    explicit Gen(const TermGenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {
        const std::size_t hi = std::max<std::size_t>(cfg.max_defs, 2);
        target_ = 2 + draw(hi - 1);
    }

    Term run() {
        Builder b;
        if (draw(3) != 0) {
            note(b.unknown(name("u"), draw(3) == 0 ? Sort::boolean() : Sort::integer()));
        }
        while (used_ < target_) {
            step(b, 0);
        }
        // Prefer recent top-level definitions as the result.
        const auto& defs = b.defs();
        const std::size_t back = draw(std::min<std::size_t>(defs.size(), 3));
        return b.term(defs[defs.size() - 1 - back].bound);
    }

  private:
    const TermGenConfig& cfg_;
    std::mt19937_64 rng_;
    std::size_t target_;
    std::size_t used_ = 0;
    std::size_t names_ = 0;
    std::vector<Var> vis_;

    std::size_t draw(std::size_t n) { return n <= 1 ? 0 : static_cast<std::size_t>(rng_() % n); }

    std::string name(const char* prefix) { return prefix + std::to_string(names_++); }

    Var note(Var v) {
        ++used_;
        vis_.push_back(v);
        return v;
    }

    std::vector<Var> visible(const std::function<bool(const Sort&)>& pred) const {
        std::vector<Var> out;
        for (const auto& v : vis_) {
            if (pred(v.sort())) {
                out.push_back(v);
            }
        }
        return out;
    }

    Var pick_or(Builder& b, const Sort& s) {
        auto c = visible([&](const Sort& x) { return x == s; });
        if (!c.empty() && draw(5) != 0) {
            // Bias towards recent variables so terms stay connected.
            const std::size_t n = c.size();
            const std::size_t i = draw(2) == 0 ? n - 1 - draw(std::min<std::size_t>(n, 3)) : draw(n);
            return c[i];
        }
        return literal(b, s);
    }

    Var literal(Builder& b, const Sort& s) {
        if (s.is_bool()) {
            return note(b.lit_bool(name("b"), draw(2) == 0));
        }
        if (s.is_bitvec()) {
            return note(b.lit_bv(name("w"), s.width(), static_cast<long>(draw(1U << std::min(s.width(), 8U)))));
        }
        if (s.is_tuple()) {
            std::vector<Var> parts;
            for (const auto& e : s.elements()) {
                parts.push_back(pick_or(b, e));
            }
            return note(b.op(name("t"), TheoryOp::simple(OpKind::Mk), parts));
        }
        const long r = cfg_.lit_range;
        return note(b.lit_int(name("k"), static_cast<long>(draw(static_cast<std::size_t>(2 * r + 1))) - r));
    }

    GenKind choose() {
        unsigned total = 0;
        for (unsigned w : cfg_.op_weights) {
            total += w;
        }
        if (total == 0) {
            return GenKind::Literal;
        }
        std::size_t x = draw(total);
        for (std::size_t i = 0; i < cfg_.op_weights.size(); ++i) {
            if (x < cfg_.op_weights[i]) {
                return static_cast<GenKind>(i);
            }
            x -= cfg_.op_weights[i];
        }
        return GenKind::Literal;
    }

    Sort scalar_sort() { return draw(3) == 0 ? Sort::boolean() : Sort::integer(); }

    Sort any_sort() {
        auto existing = visible([](const Sort&) { return true; });
        if (!existing.empty() && draw(3) != 0) {
            return existing[draw(existing.size())].sort();
        }
        return scalar_sort();
    }

    void step(Builder& b, std::size_t depth) {
        const Sort I = Sort::integer();
        const Sort B = Sort::boolean();
        switch (choose()) {
        case GenKind::Literal: literal(b, scalar_sort()); break;
        case GenKind::Arith: {
            static constexpr OpKind ops[] = {OpKind::Add, OpKind::Sub, OpKind::Mul, OpKind::Neg, OpKind::Div};
            OpKind k = ops[draw(cfg_.allow_div ? 5 : 4)];
            Var x = pick_or(b, I);
            if (k == OpKind::Neg) {
                note(b.unary(name("a"), k, x));
            } else {
                note(b.binary(name("a"), k, x, pick_or(b, I)));
            }
            break;
        }
        case GenKind::Compare: {
            static constexpr OpKind ops[] = {OpKind::Lt, OpKind::Le, OpKind::Eq};
            OpKind k = ops[draw(3)];
            if (k == OpKind::Eq && draw(4) == 0) {
                Sort s = any_sort();
                note(b.binary(name("c"), k, pick_or(b, s), pick_or(b, s)));
            } else {
                note(b.binary(name("c"), k, pick_or(b, I), pick_or(b, I)));
            }
            break;
        }
        case GenKind::Logic: {
            static constexpr OpKind ops[] = {OpKind::And, OpKind::Or, OpKind::Not};
            OpKind k = ops[draw(3)];
            if (k == OpKind::Not) {
                note(b.unary(name("l"), k, pick_or(b, B)));
            } else {
                note(b.binary(name("l"), k, pick_or(b, B), pick_or(b, B)));
            }
            break;
        }
        case GenKind::Tuple: {
            auto tuples = visible([](const Sort& s) { return s.is_tuple(); });
            if (!tuples.empty() && draw(2) == 0) {
                Var t = tuples[draw(tuples.size())];
                note(b.op(name("g"), TheoryOp::get(static_cast<unsigned>(draw(t.sort().elements().size()))), {t}));
            } else {
                const std::size_t n = 1 + draw(std::max<std::size_t>(cfg_.max_tuple_arity, 1));
                std::vector<Var> parts;
                for (std::size_t i = 0; i < n; ++i) {
                    parts.push_back(pick_or(b, scalar_sort()));
                }
                note(b.op(name("t"), TheoryOp::simple(OpKind::Mk), parts));
            }
            break;
        }
        case GenKind::Nondet: {
            Sort s = any_sort();
            Var x = pick_or(b, s);
            note(b.nondet(name("n"), x, pick_or(b, s)));
            break;
        }
        case GenKind::Assume: {
            Var c = pick_or(b, B);
            note(b.assume(name("s"), c, pick_or(b, any_sort())));
            break;
        }
        case GenKind::Unknown: note(b.unknown(name("u"), scalar_sort())); break;
        case GenKind::Mu:
            if (depth < cfg_.max_mu_depth && target_ - std::min(target_, used_) >= 5) {
                loop(b, depth);
            } else {
                literal(b, I);
            }
            break;
        case GenKind::BitVec: {
            const Sort W = Sort::bitvec(8);
            switch (draw(3)) {
            case 0: {
                Var x = pick_or(b, W);
                note(b.op(name("x"), TheoryOp::extract(3, 0), {x}));
                break;
            }
            case 1: {
                auto nib = visible([](const Sort& s) { return s.is_bitvec() && s.width() == 4; });
                if (nib.size() >= 1) {
                    note(b.binary(name("x"), OpKind::Concat, nib[draw(nib.size())], nib[draw(nib.size())]));
                } else {
                    note(b.unknown(name("x"), Sort::bitvec(4)));
                }
                break;
            }
            default: note(b.binary(name("x"), OpKind::Eq, pick_or(b, W), pick_or(b, W))); break;
            }
            break;
        }
        case GenKind::Count_: break;
        }
    }

    // mu over an int counter, or over a pair whose first component counts.
    void loop(Builder& b, std::size_t depth) {
        const bool pair = draw(3) == 0;
        const Sort I = Sort::integer();
        Var init;
        if (pair) {
            Sort other = scalar_sort();
            init = note(b.op(name("t"), TheoryOp::simple(OpKind::Mk), {pick_or(b, I), pick_or(b, other)}));
        } else {
            init = pick_or(b, I);
        }
        const std::size_t saved = vis_.size();
        const std::size_t body_extra = draw(3);
        Var m = b.mu(name("m"), name("s"), init, [&](Builder& body, Var s) -> Var {
            vis_.push_back(s);
            Var counter = pair ? note(body.op(name("g"), TheoryOp::get(0), {s})) : s;
            for (std::size_t i = 0; i < body_extra; ++i) {
                step(body, depth + 1);
            }
            Var one = note(body.lit_int(name("k"), 1));
            Var next = note(body.binary(name("a"), OpKind::Add, counter, one));
            Var bound = note(body.lit_int(name("k"), static_cast<long>(draw(5))));
            Var cond = note(body.binary(name("c"), OpKind::Le, next, bound));
            Var val = next;
            if (pair) {
                const Sort& other = s.sort().elements()[1];
                Var rest = pick_or(body, other);
                val = note(body.op(name("t"), TheoryOp::simple(OpKind::Mk), {next, rest}));
            }
            return note(body.assume(name("e"), cond, val));
        });
        vis_.resize(saved);
        note(m);
    }
};

}  // namespace

Term gen_term(const TermGenConfig& cfg) {
    // Literal operands and loop scaffolding can overshoot the bound; redraw
    // from a derived seed until the term fits.
    TermGenConfig c = cfg;
    for (std::uint64_t attempt = 0;; ++attempt) {
        c.seed = cfg.seed + attempt * 0x9e3779b97f4a7c15ULL;
        Term t = Gen(c).run();
        if (count_defs(t.ctx) <= std::max<std::size_t>(cfg.max_defs, 3)) {
            return t;
        }
    }
}

}  // namespace laf
