// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "laf/ir.hpp"

namespace laf {

class ParseError : public Error {
  public:
    ParseError(std::size_t line, std::size_t column, const std::string& msg);
    [[nodiscard]] std::size_t line() const { return line_; }
    [[nodiscard]] std::size_t column() const { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

/// Parses the parenthesized prefix format. Variable ids are allocated in
/// definition order (mu: loop variable, body, then the bound variable).
Term parse_term(std::string_view text);

/// Normalized text: one definition per line, mu bodies indented by two
/// spaces. Display names that occur more than once get a "~id" suffix.
std::string print_term(const Term& term);

std::string print_sort(const Sort& sort);

/// Literal spelling for a constant of the given sort.
std::string print_literal(const TheoryOp& op);

/// Non-literal operator by its text name ("add", "get.1", "extract.7.0").
std::optional<TheoryOp> parse_op_name(std::string_view name);

inline std::string normalize(std::string_view text) { return print_term(parse_term(text)); }

}  // namespace laf
