// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/value.hpp"

#include "laf/text.hpp"

namespace laf {

Value Value::boolean(bool b) {
    Value v;
    v.kind_ = Kind::Bool;
    v.num_ = b ? 1 : 0;
    return v;
}

Value Value::integer(Integer z) {
    Value v;
    v.kind_ = Kind::Int;
    v.num_ = std::move(z);
    return v;
}

Value Value::bitvec(unsigned width, Integer bits) {
    Value v;
    v.kind_ = Kind::BitVec;
    v.width_ = width;
    const Integer modulus = Integer(1) << width;
    bits %= modulus;
    if (bits < 0) {
        bits += modulus;
    }
    v.num_ = std::move(bits);
    return v;
}

Value Value::tuple(std::vector<Value> elems) {
    for (const auto& e : elems) {
        if (e.is_bottom()) {
            return bottom();
        }
    }
    Value v;
    v.kind_ = Kind::Tuple;
    v.elems_ = std::make_shared<const std::vector<Value>>(std::move(elems));
    return v;
}

const std::vector<Value>& Value::elements() const {
    static const std::vector<Value> none;
    return elems_ ? *elems_ : none;
}

bool Value::has_sort(const Sort& s) const {
    switch (kind_) {
    case Kind::Bottom: return true;
    case Kind::Bool: return s.is_bool();
    case Kind::Int: return s.is_int();
    case Kind::BitVec: return s.is_bitvec() && s.width() == width_;
    case Kind::Tuple: {
        if (!s.is_tuple() || s.elements().size() != elements().size()) {
            return false;
        }
        for (std::size_t i = 0; i < elements().size(); ++i) {
            if (!elements()[i].has_sort(s.elements()[i])) {
                return false;
            }
        }
        return true;
    }
    }
    return false;
}

std::string Value::str() const {
    switch (kind_) {
    case Kind::Bottom: return "⊥";
    case Kind::Bool: return as_bool() ? "true" : "false";
    case Kind::Int: return num_.str();
    case Kind::BitVec: return print_literal(TheoryOp::bv_const(width_, num_));
    case Kind::Tuple: {
        std::string out = "<";
        for (std::size_t i = 0; i < elements().size(); ++i) {
            out += (i ? ", " : "") + elements()[i].str();
        }
        return out + ">";
    }
    }
    return "?";
}

bool operator==(const Value& a, const Value& b) { return (a <=> b) == 0; }

std::strong_ordering operator<=>(const Value& a, const Value& b) {
    if (a.kind_ != b.kind_) {
        return a.kind_ <=> b.kind_;
    }
    if (a.width_ != b.width_) {
        return a.width_ <=> b.width_;
    }
    if (a.num_ != b.num_) {
        return a.num_ < b.num_ ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    const auto& x = a.elements();
    const auto& y = b.elements();
    return std::lexicographical_compare_three_way(x.begin(), x.end(), y.begin(), y.end());
}

std::string env_str(const Env& env, const Term& term) {
    std::string out = "{";
    bool first = true;
    for_each_binder(term.ctx, [&](const Var& v) {
        if (v.id() < env.size() && env[v.id()]) {
            out += (first ? "" : ", ") + v.name() + "↦" + env[v.id()]->str();
            first = false;
        }
    });
    return out + "}";
}

Integer tdiv(const Integer& a, const Integer& b) {
    // cpp_int division already truncates toward zero.
    return a / b;
}

Value apply_op(const TheoryOp& op, std::span<const Value> args) {
    for (const auto& a : args) {
        if (a.is_bottom()) {
            return Value::bottom();
        }
    }
    switch (op.kind) {
    case OpKind::BoolConst: return Value::boolean(op.value != 0);
    case OpKind::IntConst: return Value::integer(op.value);
    case OpKind::BvConst: return Value::bitvec(op.a, op.value);
    case OpKind::And: return Value::boolean(args[0].as_bool() && args[1].as_bool());
    case OpKind::Or: return Value::boolean(args[0].as_bool() || args[1].as_bool());
    case OpKind::Not: return Value::boolean(!args[0].as_bool());
    case OpKind::Add: return Value::integer(args[0].as_int() + args[1].as_int());
    case OpKind::Sub: return Value::integer(args[0].as_int() - args[1].as_int());
    case OpKind::Neg: return Value::integer(-args[0].as_int());
    case OpKind::Mul: return Value::integer(args[0].as_int() * args[1].as_int());
    case OpKind::Div:
        if (args[1].as_int() == 0) {
            return Value::bottom();
        }
        return Value::integer(tdiv(args[0].as_int(), args[1].as_int()));
    case OpKind::Lt: return Value::boolean(args[0].as_int() < args[1].as_int());
    case OpKind::Le: return Value::boolean(args[0].as_int() <= args[1].as_int());
    case OpKind::Eq: return Value::boolean(args[0] == args[1]);
    case OpKind::Mk: return Value::tuple(std::vector<Value>(args.begin(), args.end()));
    case OpKind::Get: return args[0].elements().at(op.a);
    case OpKind::Extract: {
        const Integer mask = (Integer(1) << (op.a - op.b + 1)) - 1;
        return Value::bitvec(op.a - op.b + 1, (args[0].bits() >> op.b) & mask);
    }
    case OpKind::Concat:
        return Value::bitvec(args[0].width() + args[1].width(), (args[0].bits() << args[1].width()) | args[1].bits());
    }
    throw Error("apply_op: unknown operator");
}

}  // namespace laf
