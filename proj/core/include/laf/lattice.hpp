// Copyright (c) LAF contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "laf/ir.hpp"
#include "laf/value.hpp"

namespace laf {

/// Integer or an infinity.
class Bound {
  public:
    static Bound neg_inf() { return Bound(InfTag{}, -1); }
    static Bound pos_inf() { return Bound(InfTag{}, 1); }
    Bound(Integer v) : inf_(0), v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
    Bound(int v) : inf_(0), v_(v) {}                 // NOLINT(google-explicit-constructor)

    [[nodiscard]] bool finite() const { return inf_ == 0; }
    [[nodiscard]] bool is_neg_inf() const { return inf_ < 0; }
    [[nodiscard]] bool is_pos_inf() const { return inf_ > 0; }
    [[nodiscard]] const Integer& value() const { return v_; }
    [[nodiscard]] int sign() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Bound& a, const Bound& b) { return a.inf_ == b.inf_ && (a.inf_ != 0 || a.v_ == b.v_); }
    friend bool operator<(const Bound& a, const Bound& b);
    friend bool operator<=(const Bound& a, const Bound& b) { return !(b < a); }

  private:
    struct InfTag {};
    Bound(InfTag /*tag*/, int inf) : inf_(inf) {}
    int inf_;
    Integer v_;
};

class Interval {
  public:
    static Interval top() { return {Bound::neg_inf(), Bound::pos_inf()}; }
    static Interval empty();
    static Interval point(Integer z) { return {z, z}; }
    /// Empty when lo > hi.
    static Interval range(Bound lo, Bound hi);
    Interval(Bound lo, Bound hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

    [[nodiscard]] bool is_empty() const { return empty_; }
    [[nodiscard]] bool is_top() const { return !empty_ && lo_.is_neg_inf() && hi_.is_pos_inf(); }
    [[nodiscard]] const Bound& lo() const { return lo_; }
    [[nodiscard]] const Bound& hi() const { return hi_; }
    [[nodiscard]] std::optional<Integer> singleton() const;
    [[nodiscard]] bool contains(const Integer& z) const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const Interval& a, const Interval& b);

  private:
    Interval() = default;
    bool empty_ = false;
    Bound lo_ = Bound::neg_inf();
    Bound hi_ = Bound::pos_inf();
};

/// Subset of {false, true}.
class BoolSet {
  public:
    static BoolSet empty() { return BoolSet(0); }
    static BoolSet top() { return BoolSet(3); }
    static BoolSet of(bool b) { return BoolSet(b ? 2 : 1); }
    [[nodiscard]] bool has(bool b) const { return (bits_ & (b ? 2 : 1)) != 0; }
    [[nodiscard]] bool is_empty() const { return bits_ == 0; }
    [[nodiscard]] unsigned bits() const { return bits_; }
    [[nodiscard]] std::string str() const;
    static BoolSet from_bits(unsigned b) { return BoolSet(b & 3U); }
    friend bool operator==(const BoolSet&, const BoolSet&) = default;

  private:
    explicit BoolSet(unsigned b) : bits_(b) {}
    unsigned bits_ = 3;
};

/// Flat lattice of integer constants.
class Const {
  public:
    static Const empty() { return Const(Kind::Empty, 0); }
    static Const top() { return Const(Kind::Top, 0); }
    static Const of(Integer z) { return Const(Kind::Value, std::move(z)); }
    [[nodiscard]] bool is_empty() const { return kind_ == Kind::Empty; }
    [[nodiscard]] bool is_top() const { return kind_ == Kind::Top; }
    [[nodiscard]] std::optional<Integer> value() const;
    [[nodiscard]] std::string str() const;
    friend bool operator==(const Const&, const Const&) = default;

  private:
    enum class Kind : std::uint8_t { Empty, Value, Top };
    Const(Kind k, Integer v) : kind_(k), v_(std::move(v)) {}
    Kind kind_;
    Integer v_;
};

/// Explicit set of bitvector constants, or top once the cap is exceeded.
class BvSet {
  public:
    static constexpr std::size_t kCap = 16;
    static BvSet top(unsigned width) { return BvSet(width, true, {}); }
    static BvSet empty(unsigned width) { return BvSet(width, false, {}); }
    static BvSet of(unsigned width, std::set<Integer> vals);
    [[nodiscard]] unsigned width() const { return width_; }
    [[nodiscard]] bool is_top() const { return top_; }
    [[nodiscard]] bool is_empty() const { return !top_ && vals_.empty(); }
    [[nodiscard]] const std::set<Integer>& values() const { return vals_; }
    [[nodiscard]] std::string str() const;
    friend bool operator==(const BvSet&, const BvSet&) = default;

  private:
    BvSet(unsigned w, bool top, std::set<Integer> v) : width_(w), top_(top), vals_(std::move(v)) {}
    unsigned width_;
    bool top_;
    std::set<Integer> vals_;
};

/// How integers are abstracted.
enum class IntMode : std::uint8_t { Interval, Constant };

struct LatticeConfig {
    IntMode int_mode = IntMode::Interval;
    /// Widening thresholds for interval bounds; empty means jump to infinity.
    std::vector<Integer> thresholds;

    static std::vector<Integer> default_thresholds() { return {-1, 0, 1, 8}; }
};

/// Scalar or tuple abstract value.
class AbsValue {
  public:
    using Rep = std::variant<Interval, Const, BoolSet, BvSet, std::vector<AbsValue>>;

    AbsValue(Interval i) : rep_(std::move(i)) {}          // NOLINT(google-explicit-constructor)
    AbsValue(Const c) : rep_(std::move(c)) {}             // NOLINT(google-explicit-constructor)
    AbsValue(BoolSet b) : rep_(b) {}                      // NOLINT(google-explicit-constructor)
    AbsValue(BvSet s) : rep_(std::move(s)) {}             // NOLINT(google-explicit-constructor)
    AbsValue(std::vector<AbsValue> t) : rep_(std::move(t)) {}  // NOLINT(google-explicit-constructor)

    static AbsValue top(const Sort& s, const LatticeConfig& cfg);
    static AbsValue empty(const Sort& s, const LatticeConfig& cfg);
    static AbsValue of_value(const Value& v, const Sort& s, const LatticeConfig& cfg);

    [[nodiscard]] const Rep& rep() const { return rep_; }
    [[nodiscard]] const Interval& interval() const { return std::get<Interval>(rep_); }
    [[nodiscard]] const Const& constant() const { return std::get<Const>(rep_); }
    [[nodiscard]] const BoolSet& boolset() const { return std::get<BoolSet>(rep_); }
    [[nodiscard]] const BvSet& bvset() const { return std::get<BvSet>(rep_); }
    [[nodiscard]] const std::vector<AbsValue>& elements() const { return std::get<std::vector<AbsValue>>(rep_); }
    [[nodiscard]] bool is_tuple() const { return std::holds_alternative<std::vector<AbsValue>>(rep_); }

    /// True when no non-⊥ value is represented.
    [[nodiscard]] bool is_empty() const;
    [[nodiscard]] bool is_top() const;
    [[nodiscard]] std::string str() const;

    friend bool operator==(const AbsValue& a, const AbsValue& b) { return a.rep_ == b.rep_; }

  private:
    Rep rep_;
};

AbsValue join(const AbsValue& a, const AbsValue& b);
AbsValue meet(const AbsValue& a, const AbsValue& b);
AbsValue widen(const AbsValue& a, const AbsValue& b, const LatticeConfig& cfg);
bool leq(const AbsValue& a, const AbsValue& b);

/// ⊥ is a member of every abstract value.
bool gamma_contains(const AbsValue& a, const Value& v);

/// Forward abstract semantics of a theory operation.
AbsValue transfer(const TheoryOp& op, std::span<const AbsValue> args, const LatticeConfig& cfg);

/// Backward refinement: given that op(args) lies in `result` (or is ⊥),
/// returns args narrowed so that every argument tuple in γ(args) whose
/// image is ⊥ or in γ(result) is kept.
std::vector<AbsValue> refine_args(const TheoryOp& op, const AbsValue& result, std::span<const AbsValue> args,
                                  const LatticeConfig& cfg);

// Interval arithmetic, exposed for tests and the relational lift.
Interval add(const Interval& a, const Interval& b);
Interval sub(const Interval& a, const Interval& b);
Interval neg(const Interval& a);
Interval mul(const Interval& a, const Interval& b);
Interval div(const Interval& a, const Interval& b);
Interval join(const Interval& a, const Interval& b);
Interval meet(const Interval& a, const Interval& b);
Interval widen(const Interval& a, const Interval& b, std::span<const Integer> thresholds = {});
bool leq(const Interval& a, const Interval& b);

}  // namespace laf
