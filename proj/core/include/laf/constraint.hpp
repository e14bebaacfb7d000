// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "laf/domain.hpp"
#include "laf/lattice.hpp"

namespace laf {

/// A boolean constraint variable required to be `pos`.
struct Lit {
    VarId var = 0;
    bool pos = true;
    friend auto operator<=>(const Lit&, const Lit&) = default;
};

/// Conjunction of literals kept sorted. An infeasible condition is one that
/// no run can satisfy.
class Condition {
  public:
    static Condition truth() { return {}; }
    static Condition never();

    [[nodiscard]] bool infeasible() const { return infeasible_; }
    [[nodiscard]] bool is_true() const { return !infeasible_ && lits_.empty(); }
    [[nodiscard]] const std::vector<Lit>& lits() const { return lits_; }
    /// Adds a literal; a complementary pair makes the condition infeasible.
    void add(Lit l);
    void add_all(const Condition& c);
    [[nodiscard]] Condition with(Lit l) const;
    /// True when every literal of `weaker` is in this condition.
    [[nodiscard]] bool implies(const Condition& weaker) const;
    [[nodiscard]] bool contradicts(const Condition& other) const;
    [[nodiscard]] Condition common(const Condition& other) const;

    friend auto operator<=>(const Condition&, const Condition&) = default;

  private:
    std::vector<Lit> lits_;
    bool infeasible_ = false;
};

struct CondEntry {
    Condition cond;
    AbsValue val;
};

/// Append-ordered list of guarded abstract values. Queries meet every
/// entry whose condition is implied.
using ConditionMap = std::vector<CondEntry>;

enum class PropDirection : std::uint8_t { Backward, Forward, Both };

struct PropConfig {
    /// Distinct variables refined per seed; nullopt means unlimited.
    std::optional<unsigned> limit;
    PropDirection direction = PropDirection::Both;
};

struct ConstraintConfig {
    LatticeConfig lattice;
    PropConfig prop;
    unsigned widen_delay = 1;
    /// Rounds before a loop head is sent to top.
    unsigned loop_cap = 24;
    /// Nested case splits on total literals per query.
    unsigned split_depth = 2;
    /// Propagation steps per seed.
    unsigned step_cap = 2000;
};

/// The constraint term with its per-variable condition maps.
class ConstraintState : public AbsState {
  public:
    struct Info {
        Var var;
        Rhs rhs;
        unsigned scope = 0;
        /// Condition attached to an emitted guard `assume(k, v)`.
        std::optional<Condition> guard;
        std::vector<VarId> uses;
        std::vector<VarId> dead_sources;
        /// Loop heads and mu results: values come from entries only.
        bool opaque = false;
    };

    std::shared_ptr<VarPool> pool = std::make_shared<VarPool>();
    /// Top-level constraint definitions.
    std::vector<Def> out;
    /// Input variable id to its value image and condition.
    std::vector<std::optional<Var>> gv;
    std::vector<std::optional<Condition>> gc;
    /// Constraint variable id to info and entries.
    std::vector<std::optional<Info>> info;
    std::vector<ConditionMap> store;
    unsigned scopes = 1;

    [[nodiscard]] const Info* info_of(VarId id) const;
    [[nodiscard]] const ConditionMap& entries(VarId id) const;
    [[nodiscard]] std::string var_name(VarId id) const;
    [[nodiscard]] std::string cond_str(const Condition& c) const;
    /// "cond ⊩ value, cond ⊩ value"
    [[nodiscard]] std::string map_str(VarId id) const;
    /// One "name : entries" line per top-level constraint variable.
    [[nodiscard]] std::string str() const override;
    [[nodiscard]] Term out_term(const Var& result) const { return Term{Context(out), result}; }
};

class ConstraintDomain : public AbstractDomain {
  public:
    explicit ConstraintDomain(ConstraintConfig cfg = {}) : cfg_(std::move(cfg)) {}

    [[nodiscard]] std::string name() const override { return "constraint"; }
    [[nodiscard]] std::shared_ptr<const AbsState> initial() const override;
    [[nodiscard]] std::shared_ptr<const AbsState> eval(const Context& ctx, const AbsState& in) const override;
    [[nodiscard]] Membership gamma_contains(const AbsState& state, const Env& env) const override;
    [[nodiscard]] Truth query(const AbsState& state, const Var& v) const override;
    [[nodiscard]] std::string describe(const AbsState& state, const Var& v) const override;

    /// Abstract value of an input variable under its own condition; an
    /// empty value when the variable is never live.
    [[nodiscard]] AbsValue value_of(const ConstraintState& st, const Var& v) const;
    /// Query of a constraint variable under an arbitrary condition.
    [[nodiscard]] AbsValue query_at(const ConstraintState& st, VarId cvar, const Condition& c) const;

    [[nodiscard]] const ConstraintConfig& config() const { return cfg_; }

  private:
    ConstraintConfig cfg_;
};

}  // namespace laf
