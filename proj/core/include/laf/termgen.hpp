// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>

#include "laf/ir.hpp"

namespace laf {

enum class GenKind : std::uint8_t {
    Literal,
    Arith,
    Compare,
    Logic,
    Tuple,
    Nondet,
    Assume,
    Unknown,
    Mu,
    BitVec,
    Count_,
};

struct TermGenConfig {
    /// Upper bound on definitions, counting those inside loop bodies.
    std::size_t max_defs = 12;
    std::size_t max_tuple_arity = 3;
    /// Relative weight of each definition kind.
    std::array<unsigned, static_cast<std::size_t>(GenKind::Count_)> op_weights{4, 5, 3, 2, 2, 3, 3, 2, 1, 0};
    std::uint64_t seed = 0;
    /// Integer literals are drawn from [-lit_range, lit_range].
    int lit_range = 3;
    std::size_t max_mu_depth = 1;
    bool allow_div = true;

    void set_weight(GenKind k, unsigned w) { op_weights[static_cast<std::size_t>(k)] = w; }
};

/// Random well-formed closed term. Deterministic for a given config: the
/// generator only uses modulo reductions of a 64-bit Mersenne twister.
/// Loops count an integer up to a small literal bound and exit through an
/// assume, so they stabilise under the oracle.
Term gen_term(const TermGenConfig& cfg);

}  // namespace laf
