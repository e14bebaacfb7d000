// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "laf/ir.hpp"
#include "laf/value.hpp"

namespace laf {

struct FoSort {
    enum class Kind : std::uint8_t { Bool, Int, BitVec };
    Kind kind = Kind::Int;
    unsigned width = 0;

    static FoSort boolean() { return {Kind::Bool, 0}; }
    static FoSort integer() { return {Kind::Int, 0}; }
    static FoSort bitvec(unsigned w) { return {Kind::BitVec, w}; }
    [[nodiscard]] std::string smt() const;
    friend bool operator==(const FoSort&, const FoSort&) = default;
};

struct Fo;
using FoP = std::shared_ptr<const Fo>;

/// Solver-level expression. Applications use SMT-LIB operator names; "pred"
/// applications name a Horn predicate.
struct Fo {
    enum class Kind : std::uint8_t { Var, BoolLit, IntLit, BvLit, App, Pred };
    Kind kind = Kind::BoolLit;
    FoSort sort;
    std::size_t var = 0;  // Var
    Integer value;        // literals (bools as 0/1, bitvector bits)
    std::string op;       // App operator or predicate name
    unsigned hi = 0;      // extract bounds
    unsigned lo = 0;
    std::vector<FoP> args;
};

struct FoVar {
    std::string name;
    FoSort sort;
    /// Index of the definedness variable of the LAF variable owning this
    /// value leaf, if any.
    std::optional<std::size_t> owner;
};

/// Solver variables standing for one LAF variable: c_x and one value
/// variable per scalar leaf.
struct VarEnc {
    Sort sort = Sort::integer();
    std::size_t c = 0;
    std::vector<std::size_t> leaves;
};

struct FoFormula {
    std::vector<FoVar> vars;
    std::vector<FoP> conjuncts;
    std::map<VarId, VarEnc> enc;
    /// Defining equation of each value leaf (leaf index to expression),
    /// used to extend a model to dead variables.
    std::map<std::size_t, FoP> equations;

    [[nodiscard]] const VarEnc& of(const Var& v) const;
};

using Assignment = std::vector<std::optional<Integer>>;

/// Evaluates e; nullopt when a variable it needs is unassigned. Bools are
/// 0/1, division by zero is 0.
std::optional<Integer> fo_eval(const Fo& e, const Assignment& a);
std::string fo_str(const Fo& e, const std::vector<FoVar>& vars);

/// Loop-free part exact; a mu result gets fresh values and the definedness
/// of its initial value.
FoFormula to_fo(const Term& term);

/// A model of the formula matching env on every top-level variable; throws
/// laf::Error when env is not one of the term's environments.
Assignment embed_model(const FoFormula& f, const Term& term, const Env& env);
/// True when every conjunct evaluates to true under a.
bool satisfies(const FoFormula& f, const Assignment& a);

struct HornPred {
    std::string name;
    std::vector<FoSort> params;
    VarId mu = 0;
    /// Captured LAF variables, then the loop variable.
    std::vector<Var> captured;
};

struct HornClause {
    std::string name;
    std::vector<FoP> body;
    /// Predicate application, or null for a query.
    FoP head;
    /// Index into preds of the head predicate.
    std::size_t pred = 0;
    /// Consecution clause: the body starts with an application of the
    /// head predicate to the loop state.
    bool step = false;
};

struct HornSystem {
    std::vector<FoVar> vars;
    std::vector<HornPred> preds;
    std::vector<HornClause> clauses;
    /// Constraints of the top-level definitions, the body of every query.
    std::vector<FoP> top;
    std::map<VarId, VarEnc> enc;

    [[nodiscard]] const VarEnc& of(const Var& v) const;
};

HornSystem to_horn(const Term& term);

/// SMT-LIB script asserting the formula, c_goal and v_goal = target.
std::string emit_smtlib(const FoFormula& f, const Var& goal, const Value& target);
/// HORN script whose query clause derives false from c_goal and
/// v_goal = target; "sat" means the target is unreachable.
std::string emit_horn(const HornSystem& h, const Var& goal, const Value& target);

struct HornEvalConfig {
    /// Consecution steps allowed from each initial state.
    std::size_t k = 4;
    /// Window for unconstrained integer solver variables.
    Integer lo = -4;
    Integer hi = 4;
    /// Abort when a relation or search grows past this.
    std::size_t max_solutions = 500000;
};

/// Values of goal in solutions of the top-level constraints, with
/// predicates computed by bounded unrolling; ⊥ stands for c_goal = false.
std::set<Value> horn_outcomes(const HornSystem& h, const Var& goal, const HornEvalConfig& cfg);

enum class SolverAnswer : std::uint8_t { Sat, Unsat, Unknown, Error };

struct SolverRun {
    SolverAnswer answer = SolverAnswer::Error;
    std::string output;
};

/// Runs an external solver. `command` contains "{file}", which is replaced
/// by the path; the run is killed after timeout_s seconds.
SolverRun run_solver(const std::string& command, const std::string& path, unsigned timeout_s);
std::string answer_str(SolverAnswer a);

/// The term with the unknown bound to v replaced by a literal.
Term pin_unknown(const Term& term, const Var& v, const Value& value);

}  // namespace laf
