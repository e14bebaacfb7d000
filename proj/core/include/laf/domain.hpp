// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>

#include "laf/ir.hpp"
#include "laf/semantics.hpp"

namespace laf {

/// Opaque abstract state of some domain.
class AbsState {
  public:
    virtual ~AbsState() = default;
    [[nodiscard]] virtual std::string str() const = 0;
};

struct Membership {
    enum class Kind : std::uint8_t { Member, NotMember, Unknown };
    Kind kind = Kind::Member;
    /// Variable whose value was rejected, when known.
    std::optional<Var> witness;
    std::string detail;

    static Membership yes() { return {}; }
    static Membership no(std::optional<Var> v, std::string why) { return {Kind::NotMember, std::move(v), std::move(why)}; }
    static Membership unknown(std::string why) { return {Kind::Unknown, std::nullopt, std::move(why)}; }
};

/// Outcome of asking a domain about a boolean variable.
enum class Truth : std::uint8_t {
    Proved,   // every live value is true (vacuous when none is live)
    Refuted,  // every live value is false and some value may be live
    Unknown,
};

std::string truth_str(Truth t);

/// A quadruple (states, abstract evaluation, initial state, γ) where γ is
/// exposed as a membership test.
class AbstractDomain {
  public:
    virtual ~AbstractDomain() = default;

    [[nodiscard]] virtual std::string name() const = 0;
    [[nodiscard]] virtual std::shared_ptr<const AbsState> initial() const = 0;
    /// Abstract evaluation of ctx appended to the input state.
    [[nodiscard]] virtual std::shared_ptr<const AbsState> eval(const Context& ctx, const AbsState& in) const = 0;
    /// Whether the environment is in γ(state). Must be pure.
    [[nodiscard]] virtual Membership gamma_contains(const AbsState& state, const Env& env) const = 0;

    /// What the state says about a boolean variable bound in the analysed term.
    [[nodiscard]] virtual Truth query(const AbsState& state, const Var& v) const = 0;
    /// Human-readable abstract value of a variable.
    [[nodiscard]] virtual std::string describe(const AbsState& state, const Var& v) const = 0;

    [[nodiscard]] std::shared_ptr<const AbsState> analyze(const Term& term) const { return eval(term.ctx, *initial()); }
};

struct SoundnessVerdict {
    enum class Kind : std::uint8_t { Ok, Counterexample, Inconclusive };
    Kind kind = Kind::Ok;
    std::optional<Env> env;
    std::optional<Var> var;
    std::string message;

    [[nodiscard]] bool ok() const { return kind == Kind::Ok; }
    [[nodiscard]] bool counterexample() const { return kind == Kind::Counterexample; }
};

/// Checks Definition 2 on one closed term: every oracle environment must
/// lie in γ of the abstract result. Oracle budget errors and undecided
/// membership are reported as inconclusive.
SoundnessVerdict soundness_check(const AbstractDomain& dom, const Term& term, const EnumBudget& budget);

}  // namespace laf
