// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#include "laf/domain.hpp"

namespace laf {

std::string truth_str(Truth t) {
    switch (t) {
    case Truth::Proved: return "proved";
    case Truth::Refuted: return "false";
    case Truth::Unknown: return "unknown";
    }
    return "?";
}

SoundnessVerdict soundness_check(const AbstractDomain& dom, const Term& term, const EnumBudget& budget) {
    SoundnessVerdict out;
    EnvSet envs;
    try {
        envs = collect(term, budget);
    } catch (const BudgetExceeded& e) {
        out.kind = SoundnessVerdict::Kind::Inconclusive;
        out.message = std::string("oracle: ") + e.what();
        return out;
    }

    // Definition 2, rule 1.
    const auto init = dom.initial();
    const Env empty_env(term.var_count());
    if (dom.gamma_contains(*init, empty_env).kind == Membership::Kind::NotMember) {
        out.kind = SoundnessVerdict::Kind::Counterexample;
        out.env = empty_env;
        out.message = "initial state rejects the empty environment";
        return out;
    }

    const auto state = dom.analyze(term);
    bool undecided = false;
    for (const auto& g : envs) {
        const Membership m = dom.gamma_contains(*state, g);
        if (m.kind == Membership::Kind::NotMember) {
            out.kind = SoundnessVerdict::Kind::Counterexample;
            out.env = g;
            out.var = m.witness;
            out.message = m.detail.empty() ? "environment " + env_str(g, term) + " rejected"
                                           : m.detail + " in " + env_str(g, term);
            return out;
        }
        if (m.kind == Membership::Kind::Unknown && !undecided) {
            undecided = true;
            out.message = m.detail;
        }
    }
    if (undecided) {
        out.kind = SoundnessVerdict::Kind::Inconclusive;
    }
    return out;
}

}  // namespace laf
