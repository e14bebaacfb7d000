// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "laf/constraint.hpp"
#include "laf/domain.hpp"
#include "laf/rewrite.hpp"
#include "laf/while.hpp"

namespace laf {

/// A term ready for analysis, with the boolean variables to check.
struct Program {
    Term term;
    std::vector<WhileAssertion> asserts;
    /// Source form: "while" or "laf".
    std::string kind;
};

struct LoadOptions {
    unsigned unroll = 0;
    bool simplify = true;
};

struct PhaseTime {
    std::string phase;
    double ms = 0;
};

/// Parses a .while or .laf file. A .laf term's result is its assertion
/// when it is boolean. Throws laf::Error or laf::ParseError.
Program load_program(const std::string& path, const LoadOptions& opts, std::vector<PhaseTime>* times = nullptr);
Program load_program_text(std::string_view text, std::string_view kind, const LoadOptions& opts,
                          std::vector<PhaseTime>* times = nullptr);

struct DomainOptions {
    std::optional<unsigned> prop_limit;
    PropDirection prop_direction = PropDirection::Both;
    /// Widening delay for the non-relational and constraint domains;
    /// nullopt keeps each domain's default.
    std::optional<unsigned> widen_delay;
    /// Rules added to the default exact set of the rewrite domain.
    std::vector<RewriteRule> extra_rules;
};

const std::vector<std::string>& domain_names();
/// Throws laf::Error on an unknown name.
std::unique_ptr<AbstractDomain> make_domain(const std::string& name, const DomainOptions& opts);

enum class Status : std::uint8_t { ProvedTrue, ProvedFalse, Unknown };
std::string status_str(Status s);

struct AssertionResult {
    std::string name;
    std::string text;
    std::size_t line = 0;
    Status status = Status::Unknown;
    /// First domain, in run order, that decided the status.
    std::string decided_by;
    /// Per domain, in run order.
    std::vector<std::pair<std::string, Status>> per_domain;
    /// Oracle values within the integer window, when requested.
    std::optional<std::vector<std::string>> oracle;
    bool contradicts_oracle = false;
};

struct ExprResult {
    std::string name;
    /// Domain name to abstract value.
    std::vector<std::pair<std::string, std::string>> values;
    /// Condition map, when the constraint domain ran.
    std::optional<std::string> conditions;
};

struct Report {
    std::string file;
    std::vector<std::string> domains;
    std::vector<AssertionResult> asserts;
    std::vector<ExprResult> exprs;
    std::vector<PhaseTime> times;
};

struct OracleWindow {
    Integer lo;
    Integer hi;
};

/// Runs the domains in order over the program; statuses are the pointwise
/// best. With a window, proved statuses are checked against the oracle.
Report analyze_program(const Program& p, const std::vector<std::string>& domains, const DomainOptions& opts,
                       const std::optional<OracleWindow>& window = std::nullopt);

/// 0 all proved, 1 some unknown, 2 some proved false.
int exit_code(const Report& r);
std::string report_text(const Report& r);

struct LimitRow {
    std::optional<unsigned> limit;
    std::size_t unproved = 0;
    /// Top-level variables whose value is strictly below the one of the
    /// previous row.
    std::size_t refined = 0;
};

/// Constraint domain under each propagation limit, in the given order.
std::vector<LimitRow> compare_limits(const Program& p, const std::vector<std::optional<unsigned>>& limits,
                                     const DomainOptions& opts);
std::string limit_str(const std::optional<unsigned>& limit);

}  // namespace laf
