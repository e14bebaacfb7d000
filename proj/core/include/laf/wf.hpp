// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "laf/ir.hpp"

namespace laf {

struct Diagnostic {
    /// Position of the offending definition: top-level index, then indices
    /// inside nested mu bodies. Empty for term-level problems.
    std::vector<std::size_t> path;
    std::string message;

    [[nodiscard]] std::string str() const;
};

/// Checks scoping, sorts, unique binders and id ordering. Never throws.
std::vector<Diagnostic> check_wf(const Term& term);

}  // namespace laf
