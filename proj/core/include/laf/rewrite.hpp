// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "laf/domain.hpp"

namespace laf {

/// Operator tree over pattern holes ("?x", optionally sorted as "?x@int",
/// "?x@bool", "?x@bvN").
struct Pattern {
    enum class Kind : std::uint8_t { Hole, Int, Bool, Op, Nondet };
    Kind kind = Kind::Hole;
    std::string hole;
    std::optional<Sort> hole_sort;
    Integer value;
    TheoryOp op;
    std::vector<Pattern> args;

    static Pattern parse(std::string_view text);
    [[nodiscard]] std::string str() const;
    /// Operator and literal nodes.
    [[nodiscard]] std::size_t size() const;
    void holes(std::map<std::string, std::optional<Sort>>& out) const;
};

enum class RuleKind : std::uint8_t { Exact, Approx };

class Rewriter;

/// Substitution of hole names to concrete values (⊥ included).
using Subst = std::map<std::string, Value>;

/// A ground instance of a rule used by the validity checker.
struct RuleSchema {
    Pattern lhs;
    Pattern rhs;
};

struct RewriteRule {
    std::string name;
    RuleKind kind = RuleKind::Exact;
    /// Display form.
    std::string text;
    /// Rewrites a candidate definition whose arguments are already
    /// normalized; returns the variable standing for it.
    std::function<std::optional<Var>(Rewriter&, const Rhs&, const Sort&)> apply;
    std::vector<RuleSchema> schemas;
    /// Side condition on substitutions under which the rule fires.
    std::function<bool(const Subst&)> admissible;
};

/// A pattern rule "lhs => rhs" matched through definitions up to depth 3.
RewriteRule pattern_rule(std::string name, RuleKind kind, std::string_view lhs, std::string_view rhs);

struct RuleSet {
    std::vector<RewriteRule> exact;
    std::vector<RewriteRule> approx;

    [[nodiscard]] std::vector<RewriteRule> all() const;
};

RuleSet default_rulesets();
/// Over-approximating rewrites that are not shipped by default.
std::vector<RewriteRule> aggressive_rules();

/// One rule per line: "lhs => rhs [exact|approx]"; ';' starts a comment.
std::vector<RewriteRule> parse_rule_file(std::string_view text);

struct RuleCheck {
    bool valid = true;
    std::string counterexample;
};

/// Brute-force check of a rule over its schemas: holes range over small
/// values and ⊥.
RuleCheck check_rule(const RewriteRule& rule);

enum class GammaMode : std::uint8_t { Exact, OverApprox };

struct RewriteConfig {
    std::vector<RewriteRule> rules = default_rulesets().exact;
    GammaMode gamma = GammaMode::Exact;
    /// Oracle budget for γ.
    EnumBudget budget;
    /// Rule applications allowed per definition.
    unsigned fuel = 64;
};

class RewriteState : public AbsState {
  public:
    std::shared_ptr<VarPool> pool = std::make_shared<VarPool>();
    /// Top-level output definitions.
    std::vector<Def> out;
    /// Input variable id to output variable.
    std::vector<std::optional<Var>> map;

    [[nodiscard]] std::optional<Var> image(const Var& in) const;
    [[nodiscard]] Term out_term(const Var& result) const;
    [[nodiscard]] std::string str() const override;

    struct Projection {
        std::vector<VarId> keys;
        std::set<std::vector<Value>> rows;
        std::string error;
    };
    mutable std::shared_ptr<Projection> cache;
};

class RewriteDomain : public AbstractDomain {
  public:
    explicit RewriteDomain(RewriteConfig cfg = {}) : cfg_(std::move(cfg)) {}

    [[nodiscard]] std::string name() const override { return "rewrite"; }
    [[nodiscard]] std::shared_ptr<const AbsState> initial() const override;
    [[nodiscard]] std::shared_ptr<const AbsState> eval(const Context& ctx, const AbsState& in) const override;
    [[nodiscard]] Membership gamma_contains(const AbsState& state, const Env& env) const override;
    [[nodiscard]] Truth query(const AbsState& state, const Var& v) const override;
    [[nodiscard]] std::string describe(const AbsState& state, const Var& v) const override;

    /// The rewritten term, with the image of the input result.
    [[nodiscard]] Term rewrite(const Term& term) const;

  private:
    RewriteConfig cfg_;
};

/// Emission context handed to rules.
class Rewriter {
  public:
    Rewriter(RewriteState& st, const std::vector<RewriteRule>& rules, unsigned fuel);

    /// Definition of an output variable, or nullptr for loop variables,
    /// mu results and anything outside the current translation.
    [[nodiscard]] const Rhs* view(const Var& v) const;
    /// Integer literal value of v, if v is bound to one.
    [[nodiscard]] std::optional<Integer> int_literal(const Var& v) const;
    /// True when v can never evaluate to ⊥.
    [[nodiscard]] bool never_dead(const Var& v) const;
    /// True when y = ⊥ implies x = ⊥ in every environment.
    [[nodiscard]] bool dead_implies(const Var& y, const Var& x) const;

    /// Normalizes rhs through the rules and returns its representative.
    Var emit(Rhs rhs, const Sort& sort, const std::string& name = "r");
    Var emit_int(const Integer& v);
    Var emit_bool(bool v);

    /// Translates input definitions, recording images in the state.
    void translate(const Context& ctx);

  private:
    struct Info {
        Rhs rhs;
        std::vector<VarId> dead_sources;
    };

    RewriteState& st_;
    const std::vector<RewriteRule>& rules_;
    unsigned fuel_;
    unsigned budget_ = 0;
    std::vector<std::vector<Def>*> scopes_;
    std::unordered_map<VarId, Info> info_;

    Var push(Rhs rhs, const Sort& sort, const std::string& name);
    [[nodiscard]] std::vector<VarId> sources_of(const Var& v, const Rhs& rhs) const;
    [[nodiscard]] Var image(const Var& in) const;
};

}  // namespace laf
