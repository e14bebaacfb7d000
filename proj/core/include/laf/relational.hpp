// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "laf/domain.hpp"

namespace laf {

/// A variable or one scalar leaf of a tuple variable. The distinguished
/// path `zero()` stands for the constant 0, so p = k is stored as
/// p = zero + k.
struct Path {
    static constexpr VarId kZero = static_cast<VarId>(-1);
    bool is_zero = false;
    VarId var = 0;
    std::vector<unsigned> idx;

    static Path zero() { return Path{true, kZero, {}}; }
    static Path of(VarId v, std::vector<unsigned> idx = {}) { return Path{false, v, std::move(idx)}; }

    friend bool operator==(const Path&, const Path&) = default;
    friend std::strong_ordering operator<=>(const Path& a, const Path& b) {
        if (a.is_zero != b.is_zero) {
            return a.is_zero ? std::strong_ordering::less : std::strong_ordering::greater;
        }
        if (auto c = a.var <=> b.var; c != 0) {
            return c;
        }
        return a.idx <=> b.idx;
    }
};

/// Conjunction of p = q + k atoms kept in canonical union-find form: every
/// non-root path maps to the least path of its class with an offset.
class EqRel {
  public:
    static EqRel top() { return {}; }
    static EqRel bottom();

    [[nodiscard]] bool is_bottom() const { return bottom_; }
    [[nodiscard]] bool is_top() const { return !bottom_ && parent_.empty(); }

    /// Adds p = q + k.
    void add_eq(const Path& p, const Path& q, const Integer& k);
    void add_const(const Path& p, const Integer& k) { add_eq(p, Path::zero(), k); }
    /// Forgets every path of v.
    void havoc(VarId v);
    /// k with p = q + k entailed, if any.
    [[nodiscard]] std::optional<Integer> offset(const Path& p, const Path& q) const;
    [[nodiscard]] std::optional<Integer> constant(const Path& p) const { return offset(p, Path::zero()); }
    /// Atoms (member, root, offset) of the canonical form.
    [[nodiscard]] std::vector<std::tuple<Path, Path, Integer>> atoms() const;
    [[nodiscard]] bool mentions(VarId v) const;
    [[nodiscard]] std::string str(const std::function<std::string(VarId)>& name) const;

    friend EqRel meet(const EqRel& a, const EqRel& b);
    friend EqRel join(const EqRel& a, const EqRel& b);
    /// Entailment: a ⊑ b.
    friend bool leq(const EqRel& a, const EqRel& b);
    friend bool operator==(const EqRel&, const EqRel&) = default;

  private:
    bool bottom_ = false;
    std::map<Path, std::pair<Path, Integer>> parent_;

    [[nodiscard]] std::pair<Path, Integer> find(const Path& p) const;
};

/// Scalar leaves of a sort as index paths ({} for a scalar).
std::vector<std::vector<unsigned>> sort_leaves(const Sort& s);

/// Per-variable relational elements.
class RelEnv : public AbsState {
  public:
    std::vector<std::optional<EqRel>> elems;
    std::vector<std::optional<Var>> vars;
    /// Operator definitions seen so far, for assume refinement.
    std::vector<std::optional<OpRhs>> ops;

    [[nodiscard]] const EqRel* lookup(const Var& v) const;
    [[nodiscard]] std::string name_of(VarId id) const;
    [[nodiscard]] std::string str() const override;
};

struct RelConfig {
    /// Rounds before a loop result is sent to top.
    unsigned loop_cap = 64;
};

class RelationalDomain : public AbstractDomain {
  public:
    explicit RelationalDomain(RelConfig cfg = {}) : cfg_(cfg) {}

    [[nodiscard]] std::string name() const override { return "relational"; }
    [[nodiscard]] std::shared_ptr<const AbsState> initial() const override;
    [[nodiscard]] std::shared_ptr<const AbsState> eval(const Context& ctx, const AbsState& in) const override;
    [[nodiscard]] Membership gamma_contains(const AbsState& state, const Env& env) const override;
    [[nodiscard]] Truth query(const AbsState& state, const Var& v) const override;
    [[nodiscard]] std::string describe(const AbsState& state, const Var& v) const override;

    void eval_into(const Context& ctx, RelEnv& env) const;

  private:
    RelConfig cfg_;
    void eval_def(const Def& def, RelEnv& env) const;
};

/// {x ← op(args)} applied to d.
EqRel assign_transfer(EqRel d, const Var& x, const OpRhs& rhs);
/// {x ← y} applied to d.
EqRel assign_copy(EqRel d, const Var& x, const Var& y);

}  // namespace laf
