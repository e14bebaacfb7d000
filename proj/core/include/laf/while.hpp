// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "laf/ir.hpp"

namespace laf {

struct WExpr;
struct WStmt;
using WExprP = std::shared_ptr<const WExpr>;
using WStmtP = std::shared_ptr<const WStmt>;

/// WHILE expression. `op` is the source operator ("+", "<=", "!", ...);
/// unary minus is "neg".
struct WExpr {
    enum class Kind : std::uint8_t { Var, Int, Nondet, Unary, Binary };
    Kind kind = Kind::Int;
    std::string name;
    Integer value;
    std::string op;
    std::vector<WExprP> args;
    bool is_bool = false;
    std::size_t line = 0;
};

struct WStmt {
    enum class Kind : std::uint8_t { Assign, Block, If, While, Assert };
    Kind kind = Kind::Block;
    std::string var;
    WExprP expr;
    std::vector<WStmtP> body;
    WStmtP then_s;
    WStmtP else_s;  // may be null
    std::size_t line = 0;
    /// Source text of an assertion's expression.
    std::string text;
};

struct WProgram {
    std::vector<WStmtP> stmts;
    /// Program variables in order of first occurrence; fixes tuple indices.
    std::vector<std::string> vars;
};

/// Parses a WHILE program; throws laf::ParseError with a position.
WProgram parse_while(std::string_view text);

/// Peels n iterations of every loop: while e s becomes if e {s; while e s}.
WProgram unroll_loops(const WProgram& p, unsigned n);

std::string expr_str(const WExpr& e);

struct WhileAssertion {
    std::string name;
    Var var;
    std::size_t line = 0;
    std::string text;
};

/// A translated program: the term computes the final memory tuple, and
/// assertions are named boolean outputs.
struct WhileTranslation {
    Term term;
    std::vector<WhileAssertion> asserts;
    std::vector<std::string> vars;
};

WhileTranslation translate_while(const WProgram& p);

/// Rewrites the translation with the exact rule set (tuple projections
/// included) and drops definitions that reach neither the result nor an
/// assertion.
WhileTranslation simplify_translation(const WhileTranslation& t);

/// Removes definitions that do not reach any of `keep` (or, inside a loop
/// body, its exit).
Context eliminate_dead(const Context& ctx, const std::vector<Var>& keep);

struct WhileRunConfig {
    /// Window for initial values and nondet.
    Integer lo = -2;
    Integer hi = 2;
    /// Body executions allowed per loop entry.
    std::size_t max_iters = 4;
};

struct WhileRunResult {
    /// Final stores, in variable order.
    std::set<std::vector<Integer>> finals;
    /// Some run divided by zero or did not leave a loop within the bound.
    bool some_dead = false;
};

/// Direct interpreter over all inputs in the window.
WhileRunResult run_while(const WProgram& p, const WhileRunConfig& cfg);

}  // namespace laf
