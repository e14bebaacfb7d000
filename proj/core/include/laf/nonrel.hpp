// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "laf/domain.hpp"
#include "laf/lattice.hpp"

namespace laf {

/// Map from variable id to abstract value.
class NonRelEnv : public AbsState {
  public:
    std::vector<std::optional<AbsValue>> slots;
    /// Scalar lattice operations performed so far.
    std::uint64_t op_counter = 0;

    [[nodiscard]] const AbsValue* lookup(const Var& v) const;
    void update(const Var& v, AbsValue a);
    [[nodiscard]] std::string str() const override;
};

struct NonRelConfig {
    LatticeConfig lattice;
    /// Rounds of plain join before widening kicks in.
    unsigned widen_delay = 0;
};

/// Number of scalar leaves in an abstract value.
std::size_t scalar_size(const AbsValue& a);

class NonRelDomain : public AbstractDomain {
  public:
    explicit NonRelDomain(NonRelConfig cfg = {}) : cfg_(std::move(cfg)) {}

    [[nodiscard]] std::string name() const override;
    [[nodiscard]] std::shared_ptr<const AbsState> initial() const override;
    [[nodiscard]] std::shared_ptr<const AbsState> eval(const Context& ctx, const AbsState& in) const override;
    [[nodiscard]] Membership gamma_contains(const AbsState& state, const Env& env) const override;
    [[nodiscard]] Truth query(const AbsState& state, const Var& v) const override;
    [[nodiscard]] std::string describe(const AbsState& state, const Var& v) const override;

    /// In-place evaluation; used directly by benchmarks to avoid copies.
    void eval_into(const Context& ctx, NonRelEnv& env) const;
    /// Scalar operations attributable to evaluating one definition.
    [[nodiscard]] std::uint64_t count_ops_for(const Def& def, const NonRelEnv& env) const;

    [[nodiscard]] const NonRelConfig& config() const { return cfg_; }

  private:
    NonRelConfig cfg_;
    void eval_def(const Def& def, NonRelEnv& env) const;
};

/// Truth of a boolean abstract value.
Truth truth_of(const AbsValue& a);

}  // namespace laf
