// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <compare>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "laf/ir.hpp"

namespace laf {

/// Concrete runtime value. Bottom is the dead marker and inhabits every sort.
class Value {
  public:
    enum class Kind : std::uint8_t { Bottom, Bool, Int, BitVec, Tuple };

    Value() = default;  // Bottom
    static Value bottom() { return {}; }
    static Value boolean(bool b);
    static Value integer(Integer z);
    static Value bitvec(unsigned width, Integer bits);
    /// Collapses to Bottom when any element is Bottom.
    static Value tuple(std::vector<Value> elems);

    [[nodiscard]] Kind kind() const { return kind_; }
    [[nodiscard]] bool is_bottom() const { return kind_ == Kind::Bottom; }
    [[nodiscard]] bool as_bool() const { return num_ != 0; }
    [[nodiscard]] const Integer& as_int() const { return num_; }
    [[nodiscard]] const Integer& bits() const { return num_; }
    [[nodiscard]] unsigned width() const { return width_; }
    [[nodiscard]] const std::vector<Value>& elements() const;

    /// Whether the value inhabits the sort (Bottom inhabits all).
    [[nodiscard]] bool has_sort(const Sort& s) const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Value& a, const Value& b);
    friend std::strong_ordering operator<=>(const Value& a, const Value& b);

  private:
    Kind kind_ = Kind::Bottom;
    Integer num_;
    unsigned width_ = 0;
    std::shared_ptr<const std::vector<Value>> elems_;
};

/// Array from variable id to the value computed so far.
using Env = std::vector<std::optional<Value>>;

std::string env_str(const Env& env, const Term& term);

/// Applies a theory operation; ⊥-strict, division by zero yields ⊥.
Value apply_op(const TheoryOp& op, std::span<const Value> args);

/// Truncating division (C semantics); b must be non-zero.
Integer tdiv(const Integer& a, const Integer& b);

}  // namespace laf
