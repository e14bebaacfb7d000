// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <set>
#include <vector>

#include "laf/ir.hpp"
#include "laf/value.hpp"

namespace laf {

/// Thrown when enumeration does not fit the budget. The oracle never
/// silently drops environments in the default mode.
class BudgetExceeded : public Error {
  public:
    using Error::Error;
};

struct EnumBudget {
    /// What to do when a loop has not stabilised after max_mu_iters rounds.
    enum class MuCap : std::uint8_t {
        Error,     // throw BudgetExceeded
        Truncate,  // keep exactly the values reachable in at most max_mu_iters iterations
    };

    Integer int_lo = -8;
    Integer int_hi = 8;
    std::size_t max_mu_iters = 64;
    std::size_t max_env_count = 200000;
    MuCap mu_cap = MuCap::Error;

    void validate() const;
};

using EnvSet = std::set<Env>;

/// Values enumerated for unknown of the given sort.
std::vector<Value> enumerate_sort(const Sort& sort, const EnumBudget& budget);

/// Collecting semantics of a context from one input environment. Output
/// environments are defined on the input variables plus the binders of ctx
/// (not on binders nested in mu bodies).
EnvSet collect(const Context& ctx, const Env& env, const EnumBudget& budget);

/// collect from the empty environment; environments are sized to the term.
EnvSet collect(const Term& term, const EnumBudget& budget);

/// Result values of the term (⊥ included when some run kills the result).
std::set<Value> result_values(const Term& term, const EnumBudget& budget);

struct Frame {
    Env env;
    std::size_t pc = 0;     // index of the next definition to run
    std::size_t iters = 0;  // loop iterations started in this frame (0 for the outermost)

    friend auto operator<=>(const Frame&, const Frame&) = default;
};

/// Stack of frames; frame k > 0 runs the body of the mu definition at
/// frames[k-1].pc.
struct MachineState {
    Context root;
    std::vector<Frame> frames;

    [[nodiscard]] bool terminal() const;
    friend bool operator<(const MachineState& a, const MachineState& b) { return a.frames < b.frames; }
    friend bool operator==(const MachineState& a, const MachineState& b) { return a.frames == b.frames; }
};

MachineState initial_state(const Term& term);

/// One small step. Loop entry and loop-again are only offered while the
/// frame's iteration count is below budget.max_mu_iters.
std::vector<MachineState> step(const MachineState& state, const EnumBudget& budget);

/// Final environments reachable by the small-step machine.
EnvSet reachable_results(const Term& term, const EnumBudget& budget);

}  // namespace laf
