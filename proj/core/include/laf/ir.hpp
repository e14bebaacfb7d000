// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace laf {

using Integer = boost::multiprecision::cpp_int;

/// Raised on contract violations when building or querying terms.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class Sort {
  public:
    enum class Kind : std::uint8_t { Bool, Int, BitVec, Tuple };

    Sort() = default;
    static Sort boolean() { return Sort(Kind::Bool); }
    static Sort integer() { return Sort(Kind::Int); }
    static Sort bitvec(unsigned width);
    static Sort tuple(std::vector<Sort> elements);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_bool() const { return kind_ == Kind::Bool; }
    [[nodiscard]] bool is_int() const { return kind_ == Kind::Int; }
    [[nodiscard]] bool is_bitvec() const { return kind_ == Kind::BitVec; }
    [[nodiscard]] bool is_tuple() const { return kind_ == Kind::Tuple; }
    [[nodiscard]] unsigned width() const { return width_; }
    [[nodiscard]] const std::vector<Sort>& elements() const { return elems_; }

    /// Number of scalar leaves once nested tuples are flattened.
    [[nodiscard]] std::size_t scalar_count() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Sort& a, const Sort& b);

  private:
    explicit Sort(Kind k) : kind_(k) {}
    Kind kind_ = Kind::Bool;
    unsigned width_ = 0;
    std::vector<Sort> elems_;
};

using VarId = std::uint32_t;

struct VarInfo {
    std::string name;
    Sort sort;
};

/// A LAF variable: dense id plus a shared display name and sort.
class Var {
  public:
    Var() = default;
    Var(VarId id, std::shared_ptr<const VarInfo> info) : id_(id), info_(std::move(info)) {}

    [[nodiscard]] VarId id() const { return id_; }
    [[nodiscard]] bool valid() const { return info_ != nullptr; }
    [[nodiscard]] const std::string& name() const { return info_->name; }
    [[nodiscard]] const Sort& sort() const { return info_->sort; }

    friend bool operator==(const Var& a, const Var& b) { return a.id_ == b.id_; }
    friend auto operator<=>(const Var& a, const Var& b) { return a.id_ <=> b.id_; }

  private:
    VarId id_ = 0;
    std::shared_ptr<const VarInfo> info_;
};

enum class OpKind : std::uint8_t {
    BoolConst,
    IntConst,
    BvConst,
    And,
    Or,
    Not,
    Add,
    Sub,
    Neg,
    Mul,
    Div,
    Lt,
    Le,
    Eq,
    Mk,
    Get,
    Extract,
    Concat,
};

/// A theory operation with its static parameters (literal value, tuple
/// index, extraction bounds).
struct TheoryOp {
    OpKind kind = OpKind::Add;
    Integer value;      // IntConst value, BvConst bits, BoolConst (0/1)
    unsigned a = 0;     // Get index, Extract hi, BvConst width
    unsigned b = 0;     // Extract lo

    static TheoryOp simple(OpKind k) { return TheoryOp{k, 0, 0, 0}; }
    static TheoryOp bool_const(bool v) { return TheoryOp{OpKind::BoolConst, v ? 1 : 0, 0, 0}; }
    static TheoryOp int_const(Integer v) { return TheoryOp{OpKind::IntConst, std::move(v), 0, 0}; }
    static TheoryOp bv_const(unsigned width, Integer bits);
    static TheoryOp get(unsigned index) { return TheoryOp{OpKind::Get, 0, index, 0}; }
    static TheoryOp extract(unsigned hi, unsigned lo) { return TheoryOp{OpKind::Extract, 0, hi, lo}; }

    [[nodiscard]] bool is_literal() const {
        return kind == OpKind::BoolConst || kind == OpKind::IntConst || kind == OpKind::BvConst;
    }
    /// Fixed arity, or -1 for the variadic tuple constructor.
    [[nodiscard]] int arity() const;
    /// Text-format operator name ("add", "get.1", "extract.7.0"...).
    [[nodiscard]] std::string name() const;
    /// Result sort for the given argument sorts; throws laf::Error on mismatch.
    [[nodiscard]] Sort result_sort(std::span<const Sort> args) const;

    friend bool operator==(const TheoryOp& x, const TheoryOp& y) {
        return x.kind == y.kind && x.value == y.value && x.a == y.a && x.b == y.b;
    }
};

struct Def;

/// Ordered, immutable sequence of definitions (a term with a hole).
class Context {
  public:
    Context();
    explicit Context(std::vector<Def> defs);

    [[nodiscard]] std::size_t size() const;
    [[nodiscard]] bool empty() const { return size() == 0; }
    [[nodiscard]] const Def& operator[](std::size_t i) const;
    [[nodiscard]] std::span<const Def> defs() const;
    [[nodiscard]] auto begin() const { return defs().begin(); }
    [[nodiscard]] auto end() const { return defs().end(); }

    friend bool operator==(const Context& a, const Context& b);

  private:
    std::shared_ptr<const std::vector<Def>> defs_;
};

struct OpRhs {
    TheoryOp op;
    std::vector<Var> args;
};
struct NondetRhs {
    Var a;
    Var b;
};
struct AssumeRhs {
    Var cond;
    Var val;
};
struct UnknownRhs {};
struct MuRhs {
    Var loopvar;
    Context body;
    Var exit;
    Var init;
};

using Rhs = std::variant<OpRhs, NondetRhs, AssumeRhs, UnknownRhs, MuRhs>;

struct Def {
    Var bound;
    Rhs rhs;
};

bool operator==(const Def& a, const Def& b);

/// Variables read by a definition (for mu: the init only; the body is a
/// separate scope).
std::vector<Var> operands(const Def& def);

struct Term {
    Context ctx;
    Var result;

    /// One past the largest variable id occurring in the term.
    [[nodiscard]] VarId var_count() const;
    friend bool operator==(const Term& a, const Term& b);
};

/// Visits every variable binder in definition order: for a mu definition
/// the loop variable, then the body, then the bound variable.
void for_each_binder(const Context& ctx, const std::function<void(const Var&)>& fn);

/// Total number of definitions including those nested in mu bodies.
std::size_t count_defs(const Context& ctx);

/// Persistent extension: returns ctx followed by def. Arguments must be in
/// scope (bound by ctx or listed in `outer`), the binder fresh and sorts
/// consistent; throws laf::Error otherwise.
Context append(const Context& ctx, Def def, std::span<const Var> outer = {});

/// Declared sort of v; throws laf::Error when v does not occur in term.
Sort sort_of(const Term& term, const Var& v);

/// Finds a binder by display name (first match in definition order).
std::optional<Var> find_var(const Term& term, const std::string& name);

/// Allocates dense variable ids in creation order.
class VarPool {
  public:
    explicit VarPool(VarId first = 0) : next_(first) {}
    Var fresh(std::string name, Sort sort);
    [[nodiscard]] VarId size() const { return next_; }

  private:
    VarId next_;
};

/// Mutable, checked construction of contexts. Nested builders for mu
/// bodies share the id pool and see the enclosing scope.
class Builder {
  public:
    explicit Builder(std::shared_ptr<VarPool> pool = std::make_shared<VarPool>());

    Var op(std::string name, TheoryOp op, std::vector<Var> args);
    Var lit_int(std::string name, Integer v) { return op(std::move(name), TheoryOp::int_const(std::move(v)), {}); }
    Var lit_bool(std::string name, bool v) { return op(std::move(name), TheoryOp::bool_const(v), {}); }
    Var lit_bv(std::string name, unsigned width, Integer bits) {
        return op(std::move(name), TheoryOp::bv_const(width, std::move(bits)), {});
    }
    Var binary(std::string name, OpKind k, Var x, Var y) { return op(std::move(name), TheoryOp::simple(k), {x, y}); }
    Var unary(std::string name, OpKind k, Var x) { return op(std::move(name), TheoryOp::simple(k), {x}); }
    Var nondet(std::string name, Var a, Var b);
    Var assume(std::string name, Var cond, Var val);
    Var unknown(std::string name, Sort sort);
    Var mu(std::string name, Var init, const std::function<Var(Builder& body, Var loopvar)>& body_fn) {
        std::string loop_name = name + ".s";
        return mu(std::move(name), std::move(loop_name), init, body_fn);
    }
    Var mu(std::string name, std::string loop_name, Var init,
           const std::function<Var(Builder& body, Var loopvar)>& body_fn);
    /// Appends an already-constructed definition whose binder was allocated
    /// from this builder's pool.
    void push(Def def);

    [[nodiscard]] Context context() const { return Context(defs_); }
    [[nodiscard]] Term term(Var result) const;
    [[nodiscard]] const std::vector<Def>& defs() const { return defs_; }
    [[nodiscard]] const std::shared_ptr<VarPool>& pool() const { return pool_; }
    [[nodiscard]] bool in_scope(const Var& v) const;

  private:
    Builder(std::shared_ptr<VarPool> pool, const Builder* parent);
    void require(const Var& v) const;
    void bind(const Var& v);

    std::shared_ptr<VarPool> pool_;
    const Builder* parent_ = nullptr;
    std::vector<Def> defs_;
    std::unordered_set<VarId> local_;
};

}  // namespace laf
